#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlab/bestapprox.hpp"
#include "dlab/constants.hpp"
#include "dlab/constructions.hpp"
#include "dlab/errors.hpp"
#include "dlab/spectrum.hpp"
#include "dlab/transference.hpp"
#include "report.hpp"
#include "states.hpp"

namespace {

using namespace dlab;
using report::Json;

constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInvariant = 4;

struct Common {
  uint64_t seed = 0;
  std::optional<uint64_t> budget;
  unsigned threads = default_threads();
  long bits = 96;
  std::string out;

  EnumConfig enum_config() const {
    EnumConfig cfg;
    if (budget) cfg.budget = *budget;
    cfg.threads = std::max(1u, threads);
    return cfg;
  }

  report::RunConfig run_config(const std::string& command, Json params) const {
    report::RunConfig rc;
    rc.command = command;
    rc.params = std::move(params);
    rc.seed = seed;
    rc.budget = enum_config().budget;
    rc.threads = std::max(1u, threads);
    rc.bits = bits;
    if (!out.empty()) rc.outputs.push_back(out);
    return rc;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "PRNG seed")->capture_default_str();
  app->add_option("--budget", c.budget, "Candidate-point budget (default 1e8, or DLAB_BUDGET)");
  app->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
  app->add_option("--bits", c.bits, "Working precision in bits")->capture_default_str();
  app->add_option("--out", c.out, "Output path (stdout when absent)");
}

void emit(const Common& c, const std::string& content) {
  if (c.out.empty()) {
    std::cout << content;
  } else {
    report::write_atomic(c.out, content);
  }
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Json parse_params(const std::string& text) {
  if (text.empty()) return Json::object();
  if (text[0] == '@') {
    std::ifstream in(text.substr(1), std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + text.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return Json::parse(ss.str());
  }
  return Json::parse(text);
}

std::vector<Rational> parse_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  return out;
}

// "4..6" or "5"
std::pair<long, long> parse_range(const std::string& text) {
  auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      long v = std::stol(text);
      return {v, v};
    }
    return {std::stol(text.substr(0, dots)), std::stol(text.substr(dots + 2))};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad range '" + text + "'");
  }
}

Json record_json(const ApproxRecord& r, size_t v) {
  Json j;
  j["v"] = v;
  j["b_hat"] = report::int_vector(r.b_hat);
  j["b_tilde"] = report::int_vector(r.b_tilde);
  j["M"] = report::interval(r.height);
  j["L"] = report::interval(r.quality);
  j["certified"] = r.certified;
  return j;
}

std::string lo_str(const IntervalReal& x) { return report::decimal(x.lo(), 17, false); }
std::string hi_str(const IntervalReal& x) { return report::decimal(x.hi(), 17, true); }

void check_monotone(const std::vector<ApproxRecord>& seq) {
  for (size_t i = 1; i < seq.size(); ++i) {
    if (cmp_certified(seq[i - 1].height, seq[i].height) == Ordering::Greater ||
        cmp_certified(seq[i - 1].quality, seq[i].quality) == Ordering::Less) {
      throw InvariantViolation("record sequence not monotone at v = " + std::to_string(i + 1));
    }
  }
}

// ---------------------------------------------------------------------------
// construct

struct ConstructArgs {
  std::string kind;
  std::string params;
  std::optional<long> n;
  std::optional<std::string> c;
  std::optional<size_t> levels;
  std::optional<std::string> exponent;
  std::optional<size_t> m;
  bool no_verify = false;
};

Json coordinates_json(const RealMatrix& omega, long bits) {
  Json rows = Json::array();
  for (const auto& row : omega) {
    Json r = Json::array();
    for (const auto& x : row) {
      Json v = nullptr;
      for (long b = bits; b >= 8 && v.is_null(); b /= 2) {
        try {
          v = report::interval(x.eval_bits(b));
          v["bits"] = b;
        } catch (const InsufficientLevels&) {
        }
      }
      r.push_back(v);
    }
    rows.push_back(r);
  }
  return rows;
}

int run_construct(const ConstructArgs& a, const Common& c) {
  Json params = parse_params(a.params);
  if (a.kind == "sign-varied") {
    if (!params.contains("base")) params["base"] = Json::object();
    if (a.m) params["m"] = *a.m;
    if (!params.contains("seed")) params["seed"] = c.seed;
  }
  Json& core = a.kind == "sign-varied" ? params["base"] : params;
  if (a.n) core["n"] = *a.n;
  if (a.c) core["c"] = *a.c;
  if (a.levels) core["levels"] = *a.levels;
  if (a.exponent) core["exponent"] = *a.exponent;

  report::ConstructionState st = report::build_state(a.kind, params);
  Json verification;
  std::vector<std::string> failures;
  if (!a.no_verify) {
    if (st.two_scale) {
      try {
        verify_two_scale(st.two_scale->state);
      } catch (const InvariantViolation& e) {
        failures.push_back(e.what());
      }
    } else {
      const PrimePowerState& pp = st.prime_power ? st.prime_power->state : st.sign_varied->state.base;
      PrimePowerVerification ver = verify_prime_power(pp);
      Json levels = Json::array();
      for (const auto& l : ver.levels) {
        Json lj;
        lj["j"] = l.j;
        lj["congruences"] = l.congruences;
        lj["gcds"] = l.gcds;
        lj["interleaving"] = l.interleaving;
        lj["accto"] = l.accto;
        lj["saturation"] = l.saturation;
        lj["calibration"] = l.calibration ? Json(*l.calibration) : Json(nullptr);
        levels.push_back(lj);
      }
      verification["levels"] = levels;
      failures = ver.failures;
      if (st.sign_varied) {
        try {
          verify_sign_varied(st.sign_varied->state);
        } catch (const InvariantViolation& e) {
          failures.push_back(e.what());
        }
      }
    }
    verification["failures"] = failures;
    verification["ok"] = failures.empty();
  }
  Json result;
  result["state"] = st.to_json();
  result["coordinates"] = coordinates_json(st.omega, c.bits);
  if (!a.no_verify) result["verification"] = verification;
  Json p = params;
  p["kind"] = a.kind;
  p["verify"] = !a.no_verify;
  emit(c, report::dump(report::envelope(c.run_config("construct", p), st.digest, result)));
  if (!failures.empty()) {
    for (const auto& f : failures) std::cerr << "invariant violation: " << f << "\n";
    return kExitInvariant;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// psi, seq

struct MatrixArgs {
  std::string matrix;
  std::string t;
  std::string width = "1e-12";
  std::string cap = "1000";
  std::string format;
};

int run_psi(const MatrixArgs& a, const Common& c) {
  report::MatrixInput in = report::load_matrix(a.matrix);
  ApproxProblem pb(in.omega, in.norm1, in.norm2);
  const Rational t = parse_rational(a.t);
  const Rational width = parse_rational(a.width);
  IntervalReal value = psi(pb, t, width, c.enum_config());
  Json result;
  result["m"] = pb.m;
  result["n"] = pb.n;
  result["t"] = report::exact(t);
  result["psi"] = report::interval(value);
  Json params{{"matrix", in.source}, {"t", a.t}, {"width", a.width}};
  emit(c, report::dump(report::envelope(c.run_config("psi", params), report::digest(in.source), result)));
  return 0;
}

int run_seq(const MatrixArgs& a, const Common& c) {
  report::MatrixInput in = report::load_matrix(a.matrix);
  ApproxProblem pb(in.omega, in.norm1, in.norm2);
  const Rational cap = parse_rational(a.cap);
  std::vector<ApproxRecord> seq = best_approx_sequence(pb, cap, c.enum_config());
  check_monotone(seq);
  const std::string format = a.format.empty() ? (ends_with(c.out, ".csv") ? "csv" : "json") : a.format;
  Json params{{"matrix", in.source}, {"cap", a.cap}, {"format", format}};
  report::RunConfig rc = c.run_config("seq", params);
  const std::string dg = report::digest(in.source);
  if (format == "csv") {
    std::vector<std::string> header{"v"};
    for (size_t i = 0; i < pb.n + pb.m; ++i) header.push_back("b" + std::to_string(i + 1));
    for (const char* h : {"M_lo", "M_hi", "L_lo", "L_hi"}) header.push_back(h);
    report::Csv csv(header);
    for (size_t v = 0; v < seq.size(); ++v) {
      std::vector<std::string> row{std::to_string(v + 1)};
      for (const auto& x : seq[v].b_hat) row.push_back(to_string(x));
      for (const auto& x : seq[v].b_tilde) row.push_back(to_string(x));
      row.push_back(lo_str(seq[v].height));
      row.push_back(hi_str(seq[v].height));
      row.push_back(lo_str(seq[v].quality));
      row.push_back(hi_str(seq[v].quality));
      csv.row(row);
    }
    if (c.out.empty()) {
      std::cout << csv.str();
    } else {
      report::write_csv(c.out, csv, rc, dg);
    }
    return 0;
  }
  if (format != "json") throw std::invalid_argument("unknown format '" + format + "'");
  Json records = Json::array();
  for (size_t v = 0; v < seq.size(); ++v) records.push_back(record_json(seq[v], v + 1));
  Json result{{"m", pb.m}, {"n", pb.n}, {"cap", report::exact(cap)}, {"records", records}};
  emit(c, report::dump(report::envelope(rc, dg, result)));
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum, classify

struct SpectrumArgs {
  std::string state;
  std::optional<size_t> depth;
  std::string cap = "1000";
  std::optional<size_t> v_min;
  bool exhaustive_only = false;
  std::string csv;
};

ApproxProblem state_problem(const report::ConstructionState& st) {
  if (st.two_scale) return ApproxProblem::with_max_norms(st.omega);
  const PrimePowerParams& p = st.prime_power ? st.prime_power->state.params : st.sign_varied->state.base.params;
  NormDescriptor n1 = p.norm1 ? *p.norm1 : NormDescriptor::max(2);
  NormDescriptor n2 = NormDescriptor::max(st.omega.size());
  if (st.params.contains("norm2") && !st.params.at("norm2").is_null()) {
    n2 = report::norm_from(st.params.at("norm2"), st.omega.size());
  }
  return ApproxProblem(st.omega, n1, n2);
}

Rational state_exponent(const report::ConstructionState& st) {
  if (st.two_scale) return Rational(st.two_scale->state.params.n);
  if (st.prime_power) return st.prime_power->state.params.exponent;
  return st.sign_varied->state.base.params.exponent;
}

struct RecordRun {
  std::vector<ApproxRecord> records;
  Rational cap;
  bool truncated = false;
  size_t candidates_used = 0;
  std::vector<std::string> notes;
};

RecordRun compute_records(const report::ConstructionState& st, const ApproxProblem& pb, Rational cap,
                          bool structural, const EnumConfig& cfg) {
  RecordRun out;
  for (;;) {
    try {
      out.records = best_approx_sequence(pb, cap, cfg);
      break;
    } catch (const InsufficientLevels&) {
      if (cap <= 2) throw;
      cap = floor_q(cap / 2);
      out.notes.push_back("exhaustive cap halved to " + to_string(cap) + " (insufficient levels)");
    }
  }
  out.cap = cap;
  if (structural) {
    StructuralResult s = extend_structural(pb, out.records, cap, st.candidates(), cfg);
    out.records = std::move(s.records);
    out.truncated = s.truncated;
    out.candidates_used = s.candidates_used;
    if (s.truncated) out.notes.push_back("structural tier truncated at the available precision");
  }
  return out;
}

std::optional<ClassificationReport> classify_state(const report::ConstructionState& st,
                                                   const std::vector<ApproxRecord>& seq) {
  if (st.prime_power) return classify_records(st.prime_power->state, seq);
  if (st.sign_varied) return classify_records(st.sign_varied->state, seq);
  return std::nullopt;
}

Json classification_json(const ClassificationReport& r) {
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"v", v.v},
                        {"form", v.form},
                        {"j", v.j},
                        {"sign", v.sign},
                        {"height", report::interval(v.height)},
                        {"certified", v.certified}});
  }
  Json j;
  j["verdicts"] = verdicts;
  j["threshold_height"] = r.threshold_height ? report::interval(*r.threshold_height) : Json(nullptr);
  j["threshold_level"] = r.threshold_level ? Json(*r.threshold_level) : Json(nullptr);
  j["others"] = r.others;
  j["others_above_threshold"] = r.others_above_threshold;
  return j;
}

// First record whose height reaches a_2; earlier records come from the seeds.
std::optional<size_t> two_scale_window_start(const report::ConstructionState& st,
                                             const std::vector<ApproxRecord>& seq) {
  if (!st.two_scale || st.two_scale->state.a.size() < 2) return std::nullopt;
  const Integer& a2 = st.two_scale->state.a[1];
  for (size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].height.lo() >= a2) return i + 1;
  }
  return std::nullopt;
}

Json spectrum_params(const SpectrumArgs& a, const report::ConstructionState& st) {
  Json p{{"state", st.to_json()}, {"cap", a.cap}, {"structural", !a.exhaustive_only}};
  p["depth"] = a.depth ? Json(*a.depth) : Json(nullptr);
  p["v_min"] = a.v_min ? Json(*a.v_min) : Json(nullptr);
  p["csv"] = a.csv;
  return p;
}

int run_spectrum(const SpectrumArgs& a, const Common& c) {
  report::ConstructionState st = report::load_state(a.state);
  ApproxProblem pb = state_problem(st);
  EnumConfig cfg = c.enum_config();
  RecordRun run = compute_records(st, pb, parse_rational(a.cap), !a.exhaustive_only, cfg);
  check_monotone(run.records);
  const Rational e = state_exponent(st);

  ThetaOptions opt;
  opt.bits = c.bits;
  opt.include_uncertified = !a.exhaustive_only;
  opt.v_min = a.v_min ? a.v_min : two_scale_window_start(st, run.records);
  if (a.depth) opt.v_max = std::min(*a.depth, run.records.empty() ? size_t{0} : run.records.size() - 1);
  Json theta;
  std::optional<SpectrumEstimate> est;
  try {
    est = theta_estimate(run.records, e, opt);
  } catch (const std::invalid_argument& ex) {
    run.notes.push_back(std::string("no theta window: ") + ex.what());
  }
  if (est) {
    theta["exponent"] = to_string(e);
    theta["v_min"] = est->v_min;
    theta["v_max"] = est->v_max;
    theta["sup"] = report::interval(est->theta_sup);
    theta["liminf_proxy"] = report::interval(est->theta_inf);
    theta["estimate"] = report::interval(est->estimate());
    theta["terminal"] = est->terminal;
    theta["converged"] = est->converged;
    theta["label"] = "finite-depth window estimate";
    for (const auto& n : est->notes) run.notes.push_back(n);
  }

  Json rows = Json::array();
  for (size_t i = 0; i < run.records.size(); ++i) {
    Json r = record_json(run.records[i], i + 1);
    if (est) {
      for (const auto& tr : est->rows) {
        if (tr.v != i + 1) continue;
        r["inf_term"] = report::interval(tr.inf_term);
        r["sup_term"] = tr.sup_term ? report::interval(*tr.sup_term) : Json(nullptr);
      }
    }
    rows.push_back(r);
  }

  Json result;
  result["kind"] = st.kind;
  result["exhaustive_cap"] = report::exact(run.cap);
  result["structural_candidates_used"] = run.candidates_used;
  result["truncated"] = run.truncated;
  result["records"] = rows;
  result["theta"] = est ? theta : Json(nullptr);
  if (auto cls = classify_state(st, run.records)) result["classification"] = classification_json(*cls);
  result["notes"] = run.notes;

  Json params = spectrum_params(a, st);
  report::RunConfig rc = c.run_config("spectrum", params);
  if (!a.csv.empty()) rc.outputs.push_back(a.csv);
  emit(c, report::dump(report::envelope(rc, st.digest, result)));

  if (!a.csv.empty()) {
    // Sawtooth of t^e ψ(t): value at t = M_v and the left limit at M_{v+1}.
    report::Csv csv({"v", "side", "t_lo", "t_hi", "tpsi_lo", "tpsi_hi"});
    if (est) {
      for (const auto& tr : est->rows) {
        csv.row({std::to_string(tr.v), "M_v", lo_str(tr.height), hi_str(tr.height), lo_str(tr.inf_term),
                 hi_str(tr.inf_term)});
        if (tr.next_height && tr.sup_term) {
          csv.row({std::to_string(tr.v), "M_v+1-", lo_str(*tr.next_height), hi_str(*tr.next_height),
                   lo_str(*tr.sup_term), hi_str(*tr.sup_term)});
        }
      }
    }
    report::write_csv(a.csv, csv, rc, st.digest);
  }
  return 0;
}

int run_classify(const SpectrumArgs& a, const Common& c) {
  report::ConstructionState st = report::load_state(a.state);
  if (st.two_scale) throw std::invalid_argument("classification applies to prime-power and sign-varied states");
  ApproxProblem pb = state_problem(st);
  RecordRun run = compute_records(st, pb, parse_rational(a.cap), !a.exhaustive_only, c.enum_config());
  ClassificationReport cls = *classify_state(st, run.records);
  Json result = classification_json(cls);
  result["exhaustive_cap"] = report::exact(run.cap);
  result["records"] = run.records.size();
  result["notes"] = run.notes;
  emit(c, report::dump(report::envelope(c.run_config("classify", spectrum_params(a, st)), st.digest, result)));
  return 0;
}

// ---------------------------------------------------------------------------
// survive

struct SurviveArgs {
  std::string state;
  size_t dims = 2;
  size_t trials = 50;
  size_t v = 1;
  bool degenerate = false;
};

int run_survive(const SurviveArgs& a, const Common& c) {
  report::ConstructionState st = report::load_state(a.state);
  EnumConfig cfg = c.enum_config();
  Json params{{"state", st.to_json()}, {"dims", a.dims}, {"trials", a.trials}, {"v", a.v},
              {"degenerate", a.degenerate}};
  Json result;
  if (a.degenerate) {
    if (st.omega.size() != 1) throw std::invalid_argument("the degenerate extension needs a 1x2 base");
    ApproxProblem pb = ApproxProblem::with_max_norms(st.omega);
    std::vector<ApproxRecord> records;
    for (Rational cap(16);; cap *= 2) {
      records = best_approx_sequence(pb, cap, cfg);
      if (records.size() >= a.v + 1) break;
    }
    RealMatrix ext(1, std::vector<ExactReal>(a.dims, ExactReal(0)));
    ext[0][0] = st.omega[0][0] + st.omega[0][1];
    SurvivalOutcome o = survives(st.omega, records, a.v, ext, cfg);
    result["extension"] = "(xi1 + xi2, 0, ...)";
    result["survived"] = o.survived;
    result["embedded_identity"] = o.embedded_identity;
    result["better"] = report::int_vector(o.better);
  } else {
    SurvivalReport r = survival_sample(st.omega, a.dims, a.trials, a.v, c.seed, cfg);
    result["v"] = r.v;
    result["L_v"] = report::interval(r.L_v);
    result["T_v"] = report::exact(r.T_v);
    result["trials"] = r.trials;
    result["survivors"] = r.survivors;
    result["identity_holds"] = r.identity_holds;
    result["fraction"] = report::exact(ratio(Integer(static_cast<unsigned long>(r.survivors)),
                                             Integer(static_cast<unsigned long>(r.trials))));
    result["survived"] = r.survived;
    result["delta"] = r.delta ? report::interval(*r.delta) : Json(nullptr);
    result["floor"] = r.floor ? report::interval(*r.floor) : Json(nullptr);
    result["label"] = "Monte-Carlo evidence";
  }
  emit(c, report::dump(report::envelope(c.run_config("survive", params), st.digest, result)));
  return 0;
}

// ---------------------------------------------------------------------------
// transfer

struct TransferArgs {
  std::string matrix;
  std::string A;
  std::string B;
  std::string C = "auto";
  bool calibrate = false;
  std::vector<std::string> shapes{"1x2", "2x1"};
  size_t trials = 200;
  bool folklore = false;
  std::string rho = "1/4";
  std::string heights;
  std::optional<std::string> kappa;
};

Json dual_params_json(const DualParams& d) {
  return {{"n", d.n},
          {"m", d.m},
          {"C", to_string(d.C)},
          {"A_star", report::interval(d.A_star_value)},
          {"B_star", report::interval(d.B_star_value)}};
}

Rational resolve_C(const std::string& text, long n, long m) {
  if (text != "auto") return parse_rational(text);
  auto C = default_transfer_constant(n, m);
  if (!C) {
    throw std::invalid_argument("no calibrated constant for " + std::to_string(n) + "x" + std::to_string(m) +
                                "; pass --C or run --calibrate");
  }
  return *C;
}

int run_transfer(const TransferArgs& a, const Common& c) {
  EnumConfig cfg = c.enum_config();
  if (a.calibrate) {
    CalibrationOptions opt;
    opt.trials = a.trials;
    opt.seed = c.seed;
    Json table = Json::object();
    for (const auto& shape : a.shapes) {
      auto x = shape.find('x');
      if (x == std::string::npos) throw std::invalid_argument("shape must look like 1x2");
      const long m = std::stol(shape.substr(0, x)), n = std::stol(shape.substr(x + 1));
      CalibrationReport r = calibrate_transfer_constant(n, m, opt, cfg);
      table[shape] = {{"n", r.n},
                      {"m", r.m},
                      {"C", to_string(r.C)},
                      {"matrices", r.matrices},
                      {"cases", r.cases},
                      {"primal_empty", r.primal_empty},
                      {"uncalibrated", r.uncalibrated},
                      {"label", r.label}};
    }
    Json params{{"calibrate", true}, {"shapes", a.shapes}, {"trials", a.trials}};
    emit(c, report::dump(report::envelope(c.run_config("transfer", params), report::digest(table), table)));
    return 0;
  }

  report::MatrixInput in = report::load_matrix(a.matrix);
  const long m = static_cast<long>(in.omega.size()), n = static_cast<long>(in.omega[0].size());
  const Rational C = resolve_C(a.C, n, m);
  if (a.folklore) {
    ApproxProblem pb(in.omega, in.norm1, in.norm2);
    const Rational rho = parse_rational(a.rho);
    std::optional<Rational> kappa;
    if (a.kappa) kappa = parse_rational(*a.kappa);
    TransposeReport r = transpose_folklore_check(pb, C, rho, parse_list(a.heights), kappa, cfg);
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"u", to_string(row.u)},
                      {"di_evidence", row.di_evidence},
                      {"nonsing_evidence", row.nonsing_evidence},
                      {"normalized", row.normalized ? report::interval(*row.normalized) : Json(nullptr)}});
    }
    Json result{{"n", r.n},
                {"m", r.m},
                {"delta", report::interval(r.delta)},
                {"kappa", to_string(r.kappa)},
                {"rows", rows},
                {"di_count", r.di_count},
                {"nonsing_count", r.nonsing_count},
                {"label", r.label}};
    Json params{{"matrix", in.source}, {"C", to_string(C)}, {"rho", a.rho}, {"heights", a.heights},
                {"kappa", a.kappa ? Json(*a.kappa) : Json(nullptr)}};
    emit(c, report::dump(report::envelope(c.run_config("transfer", params), report::digest(in.source), result)));
    return 0;
  }
  if (!in.rational) throw std::invalid_argument("transference checks need a rational matrix");
  const Rational A = parse_rational(a.A), B = parse_rational(a.B);
  TransferCheck r = verify_transference(*in.rational, A, B, C, cfg);
  Json result{{"verdict", to_string(r.verdict)},
              {"params", dual_params_json(r.params)},
              {"primal_point", r.primal_point ? report::int_vector(*r.primal_point) : Json(nullptr)},
              {"dual_point", r.dual_point ? report::int_vector(*r.dual_point) : Json(nullptr)}};
  if (a.C == "auto") result["C_label"] = "empirical calibration (non-rigorous)";
  Json params{{"matrix", in.source}, {"A", a.A}, {"B", a.B}, {"C", a.C}};
  emit(c, report::dump(report::envelope(c.run_config("transfer", params), report::digest(in.source), result)));
  return 0;
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsArgs {
  std::string cn;
  std::string ball;
  std::string dirichlet;
  std::string format = "json";
  size_t sweep = 12;
  long height = 60;
};

Json symbolic_json(const SymbolicValue& v) {
  return {{"exact", v.exact.str()}, {"value", report::interval(v.decimal)}};
}

int run_constants(const ConstantsArgs& a, const Common& c) {
  Json params{{"cn", a.cn}, {"ball", a.ball}, {"dirichlet", a.dirichlet}, {"format", a.format}};
  report::RunConfig rc = c.run_config("constants", params);
  if (a.format == "csv") {
    if (a.cn.empty()) throw std::invalid_argument("--format csv needs --cn");
    auto [lo, hi] = parse_range(a.cn);
    report::Csv csv({"n", "cn_lo", "cn_hi", "gamma_form", "ball_form", "forms_agree"});
    for (long n = lo; n <= hi; ++n) {
      SymbolicValue g = cn_threshold(n), b = cn_ball_form(n);
      csv.row({std::to_string(n), lo_str(g.decimal), hi_str(g.decimal), g.exact.str(), b.exact.str(),
               g.exact == b.exact ? "true" : "false"});
    }
    if (c.out.empty()) {
      std::cout << csv.str();
    } else {
      report::write_csv(c.out, csv, rc, report::digest(params));
    }
    return 0;
  }
  if (a.format != "json") throw std::invalid_argument("unknown format '" + a.format + "'");
  Json result = Json::object();
  if (!a.cn.empty()) {
    auto [lo, hi] = parse_range(a.cn);
    Json rows = Json::array();
    for (long n = lo; n <= hi; ++n) {
      SymbolicValue g = cn_threshold(n), b = cn_ball_form(n);
      rows.push_back({{"n", n},
                      {"gamma_form", symbolic_json(g)},
                      {"ball_form", symbolic_json(b)},
                      {"forms_agree", g.exact == b.exact}});
    }
    result["cn"] = rows;
  }
  if (!a.ball.empty()) {
    auto [lo, hi] = parse_range(a.ball);
    Json rows = Json::array();
    for (long k = lo; k <= hi; ++k) rows.push_back({{"k", k}, {"volume", symbolic_json(ball_volume(k))}});
    result["ball"] = rows;
  }
  if (!a.dirichlet.empty()) {
    Json j = parse_params("@" + a.dirichlet);
    NormDescriptor n1 = report::norm_from(j.at("norm1")), n2 = report::norm_from(j.at("norm2"));
    DirichletConstant d = dirichlet_D(n1, n2, a.sweep, a.height, c.seed);
    result["dirichlet"] = {{"kind", d.kind == DirichletConstant::Kind::Exact ? "exact" : "empirical_upper"},
                           {"value", report::interval(d.value)},
                           {"label", d.label},
                           {"matrices", d.matrices}};
  }
  emit(c, report::dump(report::envelope(rc, report::digest(params), result)));
  return 0;
}

// ---------------------------------------------------------------------------
// probe-independence

struct ProbeArgs {
  std::string state;
  std::string values;
  long bound = 10;
};

int run_probe(const ProbeArgs& a, const Common& c) {
  std::vector<ExactReal> values;
  std::string dg;
  Json params{{"bound", a.bound}};
  if (!a.state.empty()) {
    report::ConstructionState st = report::load_state(a.state);
    for (const auto& row : st.omega) values.insert(values.end(), row.begin(), row.end());
    dg = st.digest;
    params["state"] = st.to_json();
  } else {
    Json j = parse_params("@" + a.values);
    for (const auto& x : j.at("values")) values.push_back(report::real_from(x));
    dg = report::digest(j);
    params["values"] = j;
  }
  RelationResult r = integer_relation_probe(values, a.bound, c.enum_config());
  Json result{{"found", r.found},
              {"coeffs", r.found ? report::int_vector(r.coeffs) : Json(nullptr)},
              {"checked", r.checked},
              {"label", r.label}};
  emit(c, report::dump(report::envelope(c.run_config("probe-independence", params), dg, result)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlab: certified best approximations and Dirichlet spectrum experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dlab 0.1.0");

  Common common;
  int status = 0;

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Build a construction state and verify its invariants");
  construct->add_option("--kind", ca.kind, "two-scale | prime-power | sign-varied")
      ->required()
      ->check(CLI::IsMember({"two-scale", "prime-power", "sign-varied"}));
  construct->add_option("--params", ca.params, "Parameter JSON, inline or @file");
  construct->add_option("--n", ca.n, "Dimension n (two-scale)");
  construct->add_option("--c", ca.c, "Target constant c");
  construct->add_option("--levels", ca.levels, "Number of generated levels");
  construct->add_option("--exponent", ca.exponent, "Exponent n/m (prime-power)");
  construct->add_option("--m", ca.m, "Rows (sign-varied)");
  construct->add_flag("--no-verify", ca.no_verify, "Skip invariant verification");
  add_common(construct, common);
  construct->callback([&] { status = run_construct(ca, common); });

  MatrixArgs ma;
  auto* psi_cmd = app.add_subcommand("psi", "Certified psi(t) for a matrix");
  psi_cmd->add_option("--matrix", ma.matrix, "Matrix JSON file")->required();
  psi_cmd->add_option("--t", ma.t, "Height t")->required();
  psi_cmd->add_option("--width", ma.width, "Target interval width")->capture_default_str();
  add_common(psi_cmd, common);
  psi_cmd->callback([&] { status = run_psi(ma, common); });

  auto* seq_cmd = app.add_subcommand(
      "seq", "Best-approximation sequence up to a height cap\nCSV columns: v, b1..b(n+m), M_lo, M_hi, L_lo, L_hi");
  seq_cmd->add_option("--matrix", ma.matrix, "Matrix JSON file")->required();
  seq_cmd->add_option("--cap", ma.cap, "Height cap")->capture_default_str();
  seq_cmd->add_option("--format", ma.format, "csv | json (default from --out extension)");
  add_common(seq_cmd, common);
  seq_cmd->callback([&] { status = run_seq(ma, common); });

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand(
      "spectrum",
      "Window estimate of the Dirichlet constant for a construction state\n"
      "CSV plot columns: v, side (M_v | M_v+1-), t_lo, t_hi, tpsi_lo, tpsi_hi");
  auto add_state_opts = [&](CLI::App* cmd) {
    cmd->add_option("--state", sa.state, "State JSON from construct")->required();
    cmd->add_option("--cap", sa.cap, "Exhaustive height cap")->capture_default_str();
    cmd->add_flag("--exhaustive-only", sa.exhaustive_only, "Skip the structural candidate tier");
    add_common(cmd, common);
  };
  add_state_opts(spectrum);
  spectrum->add_option("--depth", sa.depth, "Last record index of the window");
  spectrum->add_option("--v-min", sa.v_min, "First record index of the window");
  spectrum->add_option("--csv", sa.csv, "Plot data CSV path");
  spectrum->callback([&] { status = run_spectrum(sa, common); });

  auto* classify = app.add_subcommand("classify", "Match records against the six structural forms");
  add_state_opts(classify);
  classify->callback([&] { status = run_classify(sa, common); });

  SurviveArgs sv;
  auto* survive = app.add_subcommand("survive", "Sample extensions and test survival of a best approximation");
  survive->add_option("--state", sv.state, "State JSON from construct")->required();
  survive->add_option("--dims", sv.dims, "Extra coordinates")->capture_default_str();
  survive->add_option("--trials", sv.trials, "Sampled extensions")->capture_default_str();
  survive->add_option("--v", sv.v, "Record index")->capture_default_str();
  survive->add_flag("--degenerate", sv.degenerate, "Test the extension (xi1 + xi2, 0, ...)");
  add_common(survive, common);
  survive->callback([&] { status = run_survive(sv, common); });

  TransferArgs ta;
  auto* transfer = app.add_subcommand("transfer", "Transference checks between primal and dual boxes");
  transfer->add_option("--matrix", ta.matrix, "Matrix JSON file");
  transfer->add_option("--A", ta.A, "Primal linear-form bound");
  transfer->add_option("--B", ta.B, "Primal height bound");
  transfer->add_option("--C", ta.C, "Transfer constant or 'auto'")->capture_default_str();
  transfer->add_flag("--calibrate", ta.calibrate, "Run the calibration sweep");
  transfer->add_option("--shapes", ta.shapes, "Shapes mxn for --calibrate")->delimiter(',');
  transfer->add_option("--trials", ta.trials, "Matrices per shape for --calibrate")->capture_default_str();
  transfer->add_flag("--folklore", ta.folklore, "Transpose evidence check");
  transfer->add_option("--rho", ta.rho, "rho for --folklore")->capture_default_str();
  transfer->add_option("--heights", ta.heights, "Comma-separated heights for --folklore");
  transfer->add_option("--kappa", ta.kappa, "Non-singularity constant (default rho)");
  add_common(transfer, common);
  transfer->callback([&] {
    if (!ta.calibrate && ta.matrix.empty()) throw CLI::ValidationError("--matrix", "required unless --calibrate");
    if (!ta.calibrate && !ta.folklore && (ta.A.empty() || ta.B.empty())) {
      throw CLI::ValidationError("--A/--B", "required for a transference check");
    }
    if (ta.folklore && ta.heights.empty()) throw CLI::ValidationError("--heights", "required with --folklore");
    status = run_transfer(ta, common);
  });

  ConstantsArgs ka;
  auto* constants = app.add_subcommand(
      "constants", "Closed-form constants\nCSV columns: n, cn_lo, cn_hi, gamma_form, ball_form, forms_agree");
  constants->add_option("--cn", ka.cn, "Range of n for c_n, e.g. 4..12");
  constants->add_option("--ball", ka.ball, "Range of k for unit-ball volumes");
  constants->add_option("--dirichlet", ka.dirichlet, "JSON file with norm1 and norm2");
  constants->add_option("--sweep", ka.sweep, "Matrices for the empirical Dirichlet constant")->capture_default_str();
  constants->add_option("--height", ka.height, "Height for the empirical Dirichlet constant")->capture_default_str();
  constants->add_option("--format", ka.format, "json | csv")->capture_default_str();
  add_common(constants, common);
  constants->callback([&] { status = run_constants(ka, common); });

  ProbeArgs pa;
  auto* probe = app.add_subcommand("probe-independence", "Search for small integer affine relations");
  auto* st_opt = probe->add_option("--state", pa.state, "State JSON; probes the matrix entries");
  probe->add_option("--values", pa.values, "JSON file {\"values\": [...]}")->excludes(st_opt);
  probe->add_option("--bound", pa.bound, "Coefficient bound")->capture_default_str();
  add_common(probe, common);
  probe->callback([&] {
    if (pa.state.empty() && pa.values.empty()) throw CLI::ValidationError("--state/--values", "one is required");
    status = run_probe(pa, common);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
