#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hfam/bounds.hpp"
#include "hfam/error.hpp"
#include "hfam/families.hpp"
#include "hfam/graph.hpp"
#include "hfam/measure.hpp"
#include "hfam/probability.hpp"
#include "hfam/random.hpp"
#include "hfam/verify.hpp"

namespace {

using Row = nlohmann::ordered_json;
using hfam::ErrorCode;

// Exit statuses.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string cell(const Row& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return hfam::format_decimal(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Plain: one "key value" line per field for a single record, or a
// whitespace-separated table with a header for several.
void emit(const std::vector<Row>& rows, const std::string& format, std::ostream& os) {
  if (format == "jsonl") {
    for (const auto& r : rows) os << r.dump() << "\n";
    return;
  }
  if (rows.empty()) return;
  if (format == "csv") {
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
      os << (first ? "" : ",") << key;
      first = false;
    }
    os << "\n";
    for (const auto& r : rows) {
      first = true;
      for (const auto& [_, v] : r.items()) {
        os << (first ? "" : ",") << csv_field(cell(v));
        first = false;
      }
      os << "\n";
    }
    return;
  }
  auto plain = [](const Row& v) {
    const std::string s = cell(v);
    return s.empty() ? std::string("-") : s;
  };
  if (rows.size() == 1) {
    for (const auto& [key, v] : rows.front().items()) os << key << " " << plain(v) << "\n";
    return;
  }
  bool first = true;
  for (const auto& [key, _] : rows.front().items()) {
    os << (first ? "" : " ") << key;
    first = false;
  }
  os << "\n";
  for (const auto& r : rows) {
    first = true;
    for (const auto& [_, v] : r.items()) {
      os << (first ? "" : " ") << plain(v);
      first = false;
    }
    os << "\n";
  }
}

Row estimate_row(const hfam::MeasureEstimate& e) {
  Row r;
  r["method"] = std::string(hfam::to_string(e.method));
  r["value"] = e.value;
  r["value_rational"] = e.exact ? Row(hfam::format_rational(*e.exact)) : Row(nullptr);
  r["ci_low"] = e.ci_low;
  r["ci_high"] = e.ci_high;
  r["samples"] = e.samples;
  r["seed"] = e.seed ? Row(*e.seed) : Row(nullptr);
  return r;
}

hfam::Probability parse_p(const std::string& text, const char* flag) {
  try {
    return hfam::Probability::parse(text);
  } catch (const hfam::Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

hfam::BigRational parse_q(const std::string& text, const char* flag) {
  try {
    return hfam::parse_rational(text);
  } catch (const hfam::Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

hfam::FamilyOracle parse_family(const std::string& text) {
  try {
    return hfam::FamilyOracle::parse(text);
  } catch (const hfam::Error& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
}

hfam::Graph parse_graph(const std::string& text, const char* flag) {
  try {
    return hfam::parse_graph6(text);
  } catch (const hfam::Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

// The level of clique every pair of members is expected to share.
int default_target(const hfam::FamilyOracle& oracle) {
  switch (oracle.kind()) {
    case hfam::FamilyKind::kMajority: return 2;
    case hfam::FamilyKind::kRecursive: return oracle.t();
    case hfam::FamilyKind::kTuranThreshold: return oracle.t() + 1;
    case hfam::FamilyKind::kFixedCopy: break;
  }
  throw UsageError("--t is required for this family");
}

struct Options {
  std::string family;
  int n = -1;
  int t = -1;
  std::string p;
  std::string graph, g1, g2;
  std::string method = "exact";
  std::uint64_t samples = 100000;
  std::optional<std::uint64_t> seed;
  std::string mode = "exhaustive";
  std::uint64_t budget = 1000;
  std::string target;
  std::string p_from, p_to;
  int steps = 21;
  std::string format = "plain";
  std::string out;
  unsigned threads = 0;
  bool exact_rational = false;
  std::string generator;
  std::string members_file;
  bool check_membership = false;
  std::int64_t cap = hfam::kDefaultSearchCap;
};

std::uint64_t need_seed(const Options& o, const char* what) {
  if (!o.seed) throw UsageError(std::string("--seed is required for ") + what);
  return *o.seed;
}

int run_member(const Options& o, std::ostream& os) {
  const auto oracle = parse_family(o.family);
  const auto g = parse_graph(o.graph, "--graph");
  const bool in = oracle.contains(g);
  if (o.format == "plain") {
    os << (in ? "true" : "false") << "\n";
  } else {
    Row r;
    r["family"] = oracle.spec();
    r["graph"] = o.graph;
    r["n"] = g.order();
    r["member"] = in;
    emit({r}, o.format, os);
  }
  return kOk;
}

int run_measure(const Options& o, std::ostream& os) {
  const auto oracle = parse_family(o.family);
  const auto p = parse_p(o.p, "--p");
  hfam::MeasureEstimate e;
  if (o.method == "exact") {
    hfam::ExactOptions opts;
    opts.threads = o.threads;
    if (o.exact_rational) opts.rational_max_slots = opts.max_slots;
    e = hfam::mu_exact(oracle, o.n, p, opts);
  } else if (o.method == "closed-form") {
    if (oracle.kind() != hfam::FamilyKind::kMajority) {
      throw UsageError("--method closed-form is only available for f2");
    }
    e = hfam::mu_closed_form_f2(o.n, p);
  } else {
    e = hfam::mu_monte_carlo(oracle, o.n, p, o.samples, need_seed(o, "--method mc"), o.threads);
  }
  if (o.exact_rational && !e.exact) throw UsageError("--exact-rational: no exact value for this method");
  Row r;
  r["family"] = oracle.spec();
  r["n"] = o.n;
  r["p"] = p.str();
  const Row fields = estimate_row(e);
  for (const auto& [k, v] : fields.items()) r[k] = v;
  emit({r}, o.format, os);
  return kOk;
}

hfam::MemberList load_members(const Options& o, const hfam::FamilyOracle& oracle) {
  hfam::MemberList members;
  if (!o.members_file.empty()) {
    std::istringstream in(read_file(o.members_file));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) members.push_back(parse_graph(line, "--members"));
    }
  } else {
    hfam::SplitMix64 rng(hfam::derive_seed(need_seed(o, "--mode sampled"), ~std::uint64_t{0}));
    const std::uint64_t count = std::min<std::uint64_t>(2 * o.budget, 4096);
    for (std::uint64_t i = 0; i < count; ++i) members.push_back(hfam::matching_complement(o.n, rng));
  }
  if (members.empty()) throw UsageError("--members: no graphs given");
  for (const auto& g : members) {
    if (g.order() != o.n) throw UsageError("--members: graph " + hfam::to_graph6(g) + " has the wrong order");
    if (!oracle.contains(g)) {
      throw UsageError("member source produced a non-member: " + hfam::to_graph6(g));
    }
  }
  return members;
}

int run_verify(const Options& o, std::ostream& os) {
  const auto oracle = parse_family(o.family);
  const int target = o.t > 0 ? o.t : default_target(oracle);
  hfam::VerifyOptions opts;
  opts.threads = o.threads;
  hfam::VerificationReport report;
  if (o.mode == "exhaustive") {
    report = hfam::verify_exhaustive(oracle, o.n, target, opts);
  } else {
    const std::uint64_t seed = need_seed(o, "--mode sampled");
    const hfam::MemberSource source = [&]() -> hfam::MemberSource {
      if (!o.generator.empty() || !o.members_file.empty()) return load_members(o, oracle);
      if (!o.p.empty()) return hfam::RejectionSource{parse_p(o.p, "--p")};
      if (oracle.p()) return hfam::RejectionSource{*oracle.p()};
      throw UsageError("--p, --generator or --members is required for --mode sampled");
    }();
    report = hfam::verify_sampled(oracle, o.n, target, source, o.budget, seed, opts);
  }
  if (o.format == "plain") {
    os << hfam::to_text(report);
  } else {
    Row r;
    r["family"] = report.family;
    r["n"] = report.n;
    r["target_t"] = report.target_t;
    r["mode"] = std::string(hfam::to_string(report.mode));
    r["members"] = report.members;
    r["pairs_checked"] = report.pairs_checked;
    r["status"] = report.empty_family ? "empty-family" : (report.failures.empty() ? "verified" : "failed");
    r["failures"] = report.failures.size();
    std::string sizes;
    for (auto [size, count] : report.witness_sizes) {
      sizes += (sizes.empty() ? "" : " ") + std::to_string(size) + ":" + std::to_string(count);
    }
    r["witness_sizes"] = sizes;
    r["elapsed_seconds"] = report.elapsed.count();
    if (o.format == "jsonl") {
      Row list = Row::array();
      for (const auto& f : report.failures) list.push_back({f.pair_index, f.g1, f.g2});
      r["failing_pairs"] = list;
    }
    emit({r}, o.format, os);
  }
  return report.passed() ? kOk : kCheckFailed;
}

int run_witness(const Options& o, std::ostream& os) {
  const auto g1 = parse_graph(o.g1, "--g1");
  const auto g2 = parse_graph(o.g2, "--g2");
  const auto p = parse_p(o.p, "--p");
  hfam::WitnessOptions opts;
  opts.verify_membership = o.check_membership;
  const auto w = hfam::extract_witness(g1, g2, o.t, p, opts);
  std::string vertices;
  for (int v : w.vertices.members()) vertices += (vertices.empty() ? "" : ",") + std::to_string(v);
  if (o.format == "plain") {
    os << "witness " << vertices << "\n";
    for (const auto& s : w.steps) {
      os << "step level=" << s.level << " order=" << s.order << " pivot=" << s.pivot
         << " neighborhood=" << s.neighborhood
         << " degree_bound=" << (s.degree_bound_holds ? "holds" : "violated") << "\n";
    }
    return kOk;
  }
  Row r;
  r["t"] = w.t;
  r["p"] = p.str();
  r["vertices"] = vertices;
  if (o.format == "jsonl") {
    Row steps = Row::array();
    for (const auto& s : w.steps) {
      steps.push_back({{"level", s.level}, {"order", s.order}, {"pivot", s.pivot},
                       {"neighborhood", s.neighborhood}, {"degree_bound_holds", s.degree_bound_holds}});
    }
    r["steps"] = steps;
  }
  emit({r}, o.format, os);
  return kOk;
}

Row certificate_row(const hfam::BoundCertificate& c) {
  Row r;
  r["t"] = c.t;
  r["n"] = c.n;
  r["p"] = c.p.str();
  r["term_cond1"] = c.term_cond1;
  r["min_subset_size"] = c.min_subset_size;
  r["terms"] = c.terms.size();
  r["lower_bound"] = c.lower_bound;
  return r;
}

int run_bound(const Options& o, std::ostream& os) {
  const auto p = parse_p(o.p, "--p");
  const auto cert = hfam::mu_lower_bound(o.t, o.n, p);
  if (!o.out.empty()) write_file(o.out, hfam::to_text(cert));
  if (o.format == "plain" && o.out.empty()) {
    os << hfam::to_text(cert);
  } else {
    emit({certificate_row(cert)}, o.format, os);
  }
  return kOk;
}

int run_counterexample(const Options& o, std::ostream& os) {
  const auto p = parse_p(o.p, "--p");
  const auto target = parse_q(o.target, "--target");
  const auto res = hfam::find_counterexample_n(o.t, p, target, o.cap);
  const std::string path = o.out.empty() ? "certificate.txt" : o.out;
  write_file(path, hfam::to_text(res.certificate));
  Row r;
  r["found"] = res.found;
  r["n_star"] = res.n_star;
  r["target"] = hfam::format_rational(target);
  r["lower_bound"] = res.certificate.lower_bound;
  r["evaluations"] = res.evaluations;
  r["certificate"] = path;
  emit({r}, o.format, os);
  return res.found ? kOk : kCheckFailed;
}

int run_sweep(const Options& o, std::ostream& os) {
  const auto oracle = parse_family(o.family);
  const auto grid = hfam::probability_grid(parse_q(o.p_from, "--p-from"), parse_q(o.p_to, "--p-to"), o.steps);
  const bool random = oracle.kind() != hfam::FamilyKind::kMajority;
  const std::uint64_t seed = random ? need_seed(o, "sweeps of this family") : o.seed.value_or(0);
  const auto rows = hfam::sharp_threshold_sweep(oracle, o.n, grid, o.samples, seed, o.threads);
  std::vector<Row> out;
  for (const auto& row : rows) {
    Row r;
    r["p"] = row.p.str();
    r["value"] = row.estimate.value;
    r["ci_low"] = row.estimate.ci_low;
    r["ci_high"] = row.estimate.ci_high;
    r["method"] = std::string(hfam::to_string(row.estimate.method));
    r["samples"] = row.estimate.samples;
    r["seed"] = row.estimate.seed ? Row(*row.estimate.seed) : Row(nullptr);
    out.push_back(r);
  }
  emit(out, o.format, os);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intersecting graph families: membership, measures, verification and bounds"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")
        ->check(CLI::IsMember({"plain", "csv", "jsonl"}));
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  };

  auto* member = app.add_subcommand("member", "Test whether a graph6 graph is in a family");
  member->add_option("--family", o.family, "Family spec")->required();
  member->add_option("--graph", o.graph, "Graph in graph6")->required();
  add_format(member);

  auto* measure = app.add_subcommand("measure", "mu_p of a family on n vertices");
  measure->add_option("--family", o.family, "Family spec")->required();
  measure->add_option("--n", o.n, "Vertices")->required()->check(CLI::Range(0, 64));
  measure->add_option("--p", o.p, "Edge probability (rational or decimal)")->required();
  measure->add_option("--method", o.method, "exact, closed-form or mc")
      ->check(CLI::IsMember({"exact", "closed-form", "mc"}));
  measure->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  measure->add_option("--seed", o.seed, "Monte Carlo seed");
  measure->add_flag("--exact-rational", o.exact_rational, "Require an exact rational value");
  add_threads(measure);
  add_format(measure);

  auto* verify = app.add_subcommand("verify", "Check that members pairwise share a clique");
  verify->add_option("--family", o.family, "Family spec")->required();
  verify->add_option("--n", o.n, "Vertices")->required()->check(CLI::Range(0, 64));
  verify->add_option("--t", o.t, "Clique size every intersection must contain")->check(CLI::Range(1, 64));
  verify->add_option("--mode", o.mode, "exhaustive or sampled")
      ->check(CLI::IsMember({"exhaustive", "sampled"}));
  verify->add_option("--budget", o.budget, "Pairs to sample");
  verify->add_option("--seed", o.seed, "Sampling seed");
  verify->add_option("--p", o.p, "Rejection-sampling probability");
  verify->add_option("--generator", o.generator, "Member generator")
      ->check(CLI::IsMember({"matching-complement"}));
  verify->add_option("--members", o.members_file, "File of graph6 members, one per line");
  add_threads(verify);
  add_format(verify);

  auto* witness = app.add_subcommand("witness", "Extract a clique common to two members");
  witness->add_option("--g1", o.g1, "First graph (graph6)")->required();
  witness->add_option("--g2", o.g2, "Second graph (graph6)")->required();
  witness->add_option("--t", o.t, "Family level")->required();
  witness->add_option("--p", o.p, "Family probability")->required();
  witness->add_flag("--check-membership", o.check_membership, "Verify both inputs are members first");
  add_format(witness);

  auto* bound = app.add_subcommand("bound", "Certified lower bound on the recursive family's measure");
  bound->add_option("--t", o.t, "Family level")->required();
  bound->add_option("--n", o.n, "Vertices")->required()->check(CLI::NonNegativeNumber);
  bound->add_option("--p", o.p, "Edge probability")->required();
  bound->add_option("--out", o.out, "Certificate file");
  add_format(bound);

  auto* counter = app.add_subcommand("counterexample", "Smallest n whose certified bound beats a target");
  counter->add_option("--t", o.t, "Family level")->required();
  counter->add_option("--p", o.p, "Edge probability")->required();
  counter->add_option("--target", o.target, "Target measure (rational)")->required();
  counter->add_option("--cap", o.cap, "Largest n searched")->check(CLI::PositiveNumber);
  counter->add_option("--out", o.out, "Certificate file (default certificate.txt)");
  add_format(counter);

  auto* sweep = app.add_subcommand("sweep", "mu_p across a grid of p values");
  sweep->add_option("--family", o.family, "Family spec")->required();
  sweep->add_option("--n", o.n, "Vertices")->required()->check(CLI::Range(0, 64));
  sweep->add_option("--p-from", o.p_from, "First grid value")->required();
  sweep->add_option("--p-to", o.p_to, "Last grid value")->required();
  sweep->add_option("--steps", o.steps, "Grid points")->check(CLI::PositiveNumber);
  sweep->add_option("--samples", o.samples, "Monte Carlo samples per point")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", o.seed, "Monte Carlo seed");
  add_threads(sweep);
  add_format(sweep);

  // --out redirects records, except where it names a certificate file.
  for (auto* sub : {member, measure, verify, witness, sweep}) {
    sub->add_option("--out", o.out, "Write records to this file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "hfam: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const bool owns_out = !o.out.empty() && !bound->parsed() && !counter->parsed();
    std::ofstream file;
    if (owns_out) {
      file.open(o.out);
      if (!file) throw UsageError("cannot write " + o.out);
    }
    std::ostream& os = owns_out ? static_cast<std::ostream&>(file) : std::cout;
    if (member->parsed()) return run_member(o, os);
    if (measure->parsed()) return run_measure(o, os);
    if (verify->parsed()) return run_verify(o, os);
    if (witness->parsed()) return run_witness(o, os);
    if (bound->parsed()) return run_bound(o, os);
    if (counter->parsed()) return run_counterexample(o, os);
    return run_sweep(o, os);
  } catch (const UsageError& e) {
    std::cerr << "hfam: " << e.what() << "\n";
    return kUsage;
  } catch (const hfam::Error& e) {
    std::cerr << "hfam: " << hfam::to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kWitnessNotFound ? kCheckFailed : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "hfam: " << e.what() << "\n";
    return kUsage;
  }
}
