#include "states.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dlab/errors.hpp"

namespace dlab::report {

namespace {

Json strings(const std::vector<Integer>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Json::parse(ss.str());
}

std::vector<Rational> rationals_from(const Json& a) {
  std::vector<Rational> out;
  for (const auto& x : a) out.push_back(rational_from(x));
  return out;
}

}  // namespace

NormDescriptor norm_from(const Json& j, size_t default_dim) {
  const std::string kind = j.at("kind").get<std::string>();
  const size_t dim = j.contains("dim") ? j.at("dim").get<size_t>() : default_dim;
  if ((kind == "max" || kind == "p") && dim == 0) throw std::invalid_argument("norm '" + kind + "' needs 'dim'");
  if (kind == "max") return NormDescriptor::max(dim);
  if (kind == "p") return NormDescriptor::p(dim, rational_from(j.at("p")));
  if (kind == "wmax" || kind == "weighted_max") return NormDescriptor::weighted_max(rationals_from(j.at("weights")));
  if (kind == "custom" || kind == "linear_functionals") {
    LinearFunctionalNorm spec;
    spec.outer = j.value("outer", std::string("max")) == "sum" ? LinearFunctionalNorm::Outer::Sum
                                                               : LinearFunctionalNorm::Outer::Max;
    for (const auto& f : j.at("functionals")) spec.functionals.push_back(rationals_from(f));
    const auto& eq = j.at("equiv");
    return NormDescriptor::linear_functionals(dim ? dim : spec.functionals.at(0).size(), spec, rational_from(eq.at(0)), rational_from(eq.at(1)));
  }
  throw std::invalid_argument("unknown norm kind '" + kind + "'");
}

Json norm_json(const NormDescriptor& norm) {
  Json j;
  switch (norm.kind()) {
    case NormKind::Max:
      j["kind"] = "max";
      j["dim"] = norm.dimension();
      break;
    case NormKind::P:
      j["kind"] = "p";
      j["dim"] = norm.dimension();
      j["p"] = to_string(norm.p_value());
      break;
    case NormKind::WeightedMax: {
      j["kind"] = "wmax";
      Json w = Json::array();
      for (const auto& x : norm.weights()) w.push_back(to_string(x));
      j["weights"] = w;
      break;
    }
    case NormKind::Custom: {
      const auto& spec = norm.functional_spec();
      if (!spec) throw std::invalid_argument("custom norm '" + norm.name() + "' is not serializable");
      j["kind"] = "custom";
      j["dim"] = norm.dimension();
      j["outer"] = spec->outer == LinearFunctionalNorm::Outer::Sum ? "sum" : "max";
      Json fs = Json::array();
      for (const auto& f : spec->functionals) {
        Json row = Json::array();
        for (const auto& x : f) row.push_back(to_string(x));
        fs.push_back(row);
      }
      j["functionals"] = fs;
      j["equiv"] = Json::array({to_string(norm.equiv_lo()), to_string(norm.equiv_hi())});
      break;
    }
  }
  return j;
}

ExactReal real_from(const Json& j) {
  if (j.is_object() && j.contains("quadratic")) {
    const auto& q = j.at("quadratic");
    if (!q.is_array() || q.size() != 3) throw std::invalid_argument("quadratic entry needs [a, b, d]");
    return quadratic_irrational(rational_from(q[0]), rational_from(q[1]), integer_from(q[2]));
  }
  return ExactReal(rational_from(j));
}

MatrixInput matrix_from(const Json& j) {
  const auto& rows = j.at("rows");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("matrix needs a nonempty 'rows' array");
  MatrixInput out{{}, RationalMatrix{}, NormDescriptor::max(1), NormDescriptor::max(1), j};
  bool all_rational = true;
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != rows[0].size() || r.empty()) throw DimensionMismatch("ragged matrix rows");
    std::vector<ExactReal> row;
    std::vector<Rational> qrow;
    for (const auto& x : r) {
      row.push_back(real_from(x));
      if (auto q = row.back().rational()) {
        qrow.push_back(*q);
      } else {
        all_rational = false;
      }
    }
    out.omega.push_back(std::move(row));
    if (all_rational) out.rational->push_back(std::move(qrow));
  }
  if (!all_rational) out.rational.reset();
  const size_t m = out.omega.size(), n = out.omega[0].size();
  out.norm1 = j.contains("norm1") ? norm_from(j.at("norm1"), n) : NormDescriptor::max(n);
  out.norm2 = j.contains("norm2") ? norm_from(j.at("norm2"), m) : NormDescriptor::max(m);
  return out;
}

MatrixInput load_matrix(const std::filesystem::path& path) { return matrix_from(read_json(path)); }

Json two_scale_params_json(const TwoScaleParams& p) {
  Json j;
  j["n"] = p.n;
  j["c"] = to_string(p.c);
  j["a1"] = to_string(p.a1);
  j["a2"] = to_string(p.a2);
  j["M"] = p.M;
  j["levels"] = p.levels;
  j["max_bits"] = p.max_bits;
  return j;
}

TwoScaleParams two_scale_params_from(const Json& j) {
  TwoScaleParams p;
  if (j.contains("n")) p.n = j.at("n").get<long>();
  if (j.contains("c")) p.c = rational_from(j.at("c"));
  if (j.contains("a1")) p.a1 = integer_from(j.at("a1"));
  if (j.contains("a2")) p.a2 = integer_from(j.at("a2"));
  if (j.contains("M")) p.M = j.at("M").get<std::vector<long>>();
  if (j.contains("levels")) p.levels = j.at("levels").get<size_t>();
  if (j.contains("max_bits")) p.max_bits = j.at("max_bits").get<size_t>();
  return p;
}

Json prime_power_params_json(const PrimePowerParams& p) {
  Json j;
  j["exponent"] = to_string(p.exponent);
  j["c"] = to_string(p.c);
  j["tau"] = p.tau ? Json(to_string(*p.tau)) : Json(nullptr);
  j["levels"] = p.levels;
  j["norm1"] = p.norm1 ? norm_json(*p.norm1) : Json(nullptr);
  j["gamma"] = Json::array({to_string(p.gamma.lo()), to_string(p.gamma.hi())});
  j["eps0"] = to_string(p.eps0);
  j["max_bits"] = p.max_bits;
  return j;
}

PrimePowerParams prime_power_params_from(const Json& j) {
  PrimePowerParams p;
  if (j.contains("exponent")) p.exponent = rational_from(j.at("exponent"));
  if (j.contains("c")) p.c = rational_from(j.at("c"));
  if (j.contains("tau") && !j.at("tau").is_null()) p.tau = rational_from(j.at("tau"));
  if (j.contains("levels")) p.levels = j.at("levels").get<size_t>();
  if (j.contains("norm1") && !j.at("norm1").is_null()) p.norm1 = norm_from(j.at("norm1"), 2);
  if (j.contains("gamma")) p.gamma = IntervalReal(rational_from(j.at("gamma")[0]), rational_from(j.at("gamma")[1]));
  if (j.contains("eps0")) p.eps0 = rational_from(j.at("eps0"));
  if (j.contains("max_bits")) p.max_bits = j.at("max_bits").get<size_t>();
  return p;
}

namespace {

Json prime_power_data(const PrimePowerState& s) {
  Json d;
  d["tau"] = to_string(s.tau);
  d["mu"] = to_string(s.mu);
  d["log_r"] = interval(s.log_r);
  d["alpha"] = s.alpha;
  d["gamma"] = s.gamma;
  d["beta"] = s.beta;
  d["delta"] = s.delta;
  d["A"] = strings(s.A);
  d["B"] = strings(s.B);
  d["F"] = strings(s.F);
  d["G"] = strings(s.G);
  d["warnings"] = s.warnings;
  return d;
}

}  // namespace

ConstructionState build_state(const std::string& kind, const Json& params) {
  ConstructionState st;
  st.kind = kind;
  if (kind == "two-scale") {
    TwoScaleParams p = two_scale_params_from(params);
    st.params = two_scale_params_json(p);
    st.two_scale = build_two_scale(p);
    const auto& s = st.two_scale->state;
    st.data["a"] = strings(s.a);
    st.data["M"] = s.M;
    st.data["degenerate"] = s.degenerate;
    st.data["warnings"] = s.warnings;
    st.omega = row_matrix({st.two_scale->xi1, st.two_scale->xi2});
  } else if (kind == "prime-power") {
    PrimePowerParams p = prime_power_params_from(params);
    st.params = prime_power_params_json(p);
    st.prime_power = build_prime_power(p);
    st.data = prime_power_data(st.prime_power->state);
    st.omega = row_matrix({st.prime_power->xi1, st.prime_power->xi2});
  } else if (kind == "sign-varied") {
    PrimePowerParams p = prime_power_params_from(params.value("base", Json::object()));
    const size_t m = params.value("m", size_t{1});
    const uint64_t seed = params.value("seed", uint64_t{0});
    std::optional<NormDescriptor> norm2;
    if (params.contains("norm2") && !params.at("norm2").is_null()) norm2 = norm_from(params.at("norm2"), m);
    st.params["base"] = prime_power_params_json(p);
    st.params["m"] = m;
    st.params["seed"] = seed;
    st.params["norm2"] = norm2 ? norm_json(*norm2) : Json(nullptr);
    st.sign_varied = build_sign_varied(p, m, seed, norm2);
    const auto& s = st.sign_varied->state;
    st.data["base"] = prime_power_data(s.base);
    st.data["delta"] = s.delta;
    st.data["delta_star"] = s.delta_star;
    Json F = Json::array(), G = Json::array();
    for (const auto& row : s.F) F.push_back(strings(row));
    for (const auto& row : s.G) G.push_back(strings(row));
    st.data["F"] = F;
    st.data["G"] = G;
    st.data["patterns"] = s.patterns;
    st.data["Gamma"] = interval(s.gamma);
    st.omega = st.sign_varied->V;
  } else {
    throw std::invalid_argument("unknown construction kind '" + kind + "'");
  }
  Json core;
  core["kind"] = st.kind;
  core["params"] = st.params;
  core["data"] = st.data;
  st.digest = digest(core);
  return st;
}

Json ConstructionState::to_json() const {
  Json j;
  j["kind"] = kind;
  j["params"] = params;
  j["data"] = data;
  j["digest"] = digest;
  return j;
}

std::vector<IntVector> ConstructionState::candidates() const {
  if (two_scale) return structural_candidates(two_scale->state);
  if (prime_power) return structural_candidates(prime_power->state);
  if (sign_varied) return structural_candidates(sign_varied->state.base);
  return {};
}

ConstructionState state_from(const Json& j) {
  const Json& s = j.contains("result") && j.at("result").contains("state") ? j.at("result").at("state") : j;
  ConstructionState st = build_state(s.at("kind").get<std::string>(), s.at("params"));
  if (s.contains("digest") && s.at("digest").get<std::string>() != st.digest) {
    throw InvariantViolation("state digest mismatch: stored " + s.at("digest").get<std::string>() + ", rebuilt " +
                             st.digest);
  }
  if (s.contains("data") && s.at("data") != st.data) {
    throw InvariantViolation("stored construction data differs from the rebuilt state");
  }
  return st;
}

ConstructionState load_state(const std::filesystem::path& path) { return state_from(read_json(path)); }

}  // namespace dlab::report
