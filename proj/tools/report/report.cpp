#include "report.hpp"

#include <mpfr.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dlab::report {

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["params"] = params;
  j["seed"] = seed;
  j["budget"] = budget;
  j["threads"] = threads;
  j["bits"] = bits;
  j["outputs"] = outputs;
  j["prng"] = "splitmix64-ctr-v1";
  return j;
}

std::string decimal(const Rational& q, int digits, bool round_up) {
  if (q == 0) return "0";
  const mpfr_rnd_t rnd = round_up ? MPFR_RNDU : MPFR_RNDD;
  mpfr_t x;
  mpfr_init2(x, static_cast<mpfr_prec_t>(digits * 4 + 32));
  mpfr_set_q(x, q.get_mpq_t(), rnd);
  mpfr_exp_t e = 0;
  char* s = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), x, rnd);
  mpfr_clear(x);
  std::string m(s);
  mpfr_free_str(s);
  std::string sign;
  if (!m.empty() && m[0] == '-') {
    sign = "-";
    m.erase(0, 1);
  }
  std::string out = sign + m.substr(0, 1);
  if (m.size() > 1) out += "." + m.substr(1);
  out += "e" + std::to_string(static_cast<long>(e) - 1);
  return out;
}

Json interval(const IntervalReal& x, int digits) {
  Json j;
  if (x.is_point()) return exact(x.lo());
  j["lo"] = decimal(x.lo(), digits, false);
  j["hi"] = decimal(x.hi(), digits, true);
  return j;
}

Json exact(const Rational& q) {
  Json j;
  j["lo"] = decimal(q, 17, false);
  j["hi"] = decimal(q, 17, true);
  if (bit_length(q.get_num()) + bit_length(q.get_den()) <= 256) j["exact"] = to_string(q);
  return j;
}

Json integer(const Integer& z) { return to_string(z); }

Json int_vector(const IntVector& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(integer(x));
  return a;
}

Rational rational_from(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_object() && j.contains("exact")) return rational_from(j.at("exact"));
  throw std::invalid_argument("expected a rational literal, got " + j.dump());
}

Integer integer_from(const Json& j) {
  Rational q = rational_from(j);
  if (q.get_den() != 1) throw std::invalid_argument("expected an integer, got " + j.dump());
  return q.get_num();
}

uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string digest(const Json& state) { return "fnv1a64:" + hex64(fnv1a(state.dump())); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json envelope(const RunConfig& config, const std::string& state_digest, Json result) {
  Json j;
  j["schema"] = kSchema;
  j["run_config"] = config.to_json();
  j["state_digest"] = state_digest;
  j["result"] = std::move(result);
  return j;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

void Csv::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::invalid_argument("CSV row width differs from the header");
  rows_.push_back(std::move(cells));
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void emit(std::string& out, const std::vector<std::string>& cells) {
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string Csv::str() const {
  std::string out;
  emit(out, header_);
  for (const auto& r : rows_) emit(out, r);
  return out;
}

void write_csv(const std::filesystem::path& path, const Csv& csv, const RunConfig& config,
               const std::string& state_digest) {
  write_atomic(path, csv.str());
  std::filesystem::path meta = path;
  meta += ".meta.json";
  Json j;
  j["schema"] = kSchema;
  j["run_config"] = config.to_json();
  j["state_digest"] = state_digest;
  j["csv"] = path.filename().string();
  write_atomic(meta, dump(j));
}

}  // namespace dlab::report
