#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dlab/exactnum.hpp"
#include "dlab/lattice.hpp"

namespace dlab::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

struct RunConfig {
  std::string command;
  Json params = Json::object();
  uint64_t seed = 0;
  uint64_t budget = 0;
  unsigned threads = 1;
  long bits = 96;
  std::vector<std::string> outputs;

  Json to_json() const;
};

// Decimal string with `digits` significant digits, rounded down or up.
std::string decimal(const Rational& q, int digits, bool round_up);

// {"lo": ..., "hi": ...} with outward decimal rounding.
Json interval(const IntervalReal& x, int digits = 17);
// Exact value as a degenerate interval plus the exact "p/q" string.
Json exact(const Rational& q);
Json integer(const Integer& z);
Json int_vector(const IntVector& v);

// Accepts a literal string, an integer, or an object carrying "exact".
Rational rational_from(const Json& j);
Integer integer_from(const Json& j);

uint64_t fnv1a(std::string_view bytes);
std::string hex64(uint64_t x);
std::string digest(const Json& state);

std::string dump(const Json& j);
Json envelope(const RunConfig& config, const std::string& state_digest, Json result);

// Writes via a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view content);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(std::vector<std::string> cells);
  std::string str() const;  // RFC 4180, CRLF line ends

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// The CSV plus `<path>.meta.json` holding schema, RunConfig and digest.
void write_csv(const std::filesystem::path& path, const Csv& csv, const RunConfig& config,
               const std::string& state_digest);

}  // namespace dlab::report
