#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "satisrank/online_solver.hpp"
#include "satisrank/risk_core.hpp"

namespace satisrank {

enum class Family { Normal, Uniform, LogNormal, Empirical };

std::string_view family_name(Family family);

struct DistributionSpec {
  Family family = Family::Normal;
  double param1 = 0.0;  // mean | low | mu of log
  double param2 = 1.0;  // sd | high | sigma of log
  std::uint64_t seed = 0;
  std::vector<double> values;  // Empirical only: resampled with replacement

  /// Throws ArgumentError when the parameters are invalid for the family.
  void validate() const;
  /// `normal:MEAN:SD:SEED` and friends; round-trips through parse_distribution.
  std::string to_string() const;
};

/// Parses `normal:MEAN:SD:SEED`, `uniform:LO:HI:SEED` or
/// `lognormal:MU:SIGMA:SEED`. The seed may be omitted (0).
DistributionSpec parse_distribution(std::string_view text);

/// Copy of `spec` with a different seed.
DistributionSpec with_seed(DistributionSpec spec, std::uint64_t seed);

/// Seed for one item's stream number `stream`, mixed from a base seed with
/// splitmix64 so nearby inputs give unrelated generators.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t item, std::uint64_t stream = 0);

/// Seeded draws from a DistributionSpec. The core is std::mt19937_64, whose
/// output sequence is fixed by the standard; uniforms take its top 53 bits
/// and normals come from Box-Muller, so draws do not depend on the standard
/// library's distribution classes.
class Generator {
 public:
  explicit Generator(DistributionSpec spec);

  double next();
  double uniform01();  // [0, 1)
  double standard_normal();
  std::uint64_t next_index(std::uint64_t n);  // uniform on [0, n)

  const DistributionSpec& spec() const { return spec_; }

 private:
  DistributionSpec spec_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

std::vector<double> generate_synthetic(const DistributionSpec& spec, std::int64_t n);

/// Infinite stream of generator draws.
class GeneratorSource : public ObservationSource {
 public:
  explicit GeneratorSource(DistributionSpec spec) : gen_(std::move(spec)) {}
  std::optional<double> next() override { return gen_.next(); }

 private:
  Generator gen_;
};

/// Batch CSV with header `item_id,target,value`.
std::vector<ItemBatch> parse_batches(std::istream& in, const std::string& origin = "<input>");
std::vector<ItemBatch> load_batches(const std::filesystem::path& path);
void write_batches(std::ostream& out, const std::vector<ItemBatch>& batches);
void write_batches(const std::filesystem::path& path, const std::vector<ItemBatch>& batches);

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

struct Observation {
  std::string item_id;
  double value = 0.0;
};

/// Reads `item_id,value` lines in order. A leading `item_id,value` header is
/// skipped. Malformed lines raise StreamError carrying the line number.
class StreamReader {
 public:
  explicit StreamReader(std::istream& in, std::string origin = "<stream>");
  std::optional<Observation> next();
  std::int64_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string origin_;
  std::int64_t line_ = 0;
};

/// Opens a stream file and reads it through StreamReader.
class StreamFile {
 public:
  explicit StreamFile(const std::filesystem::path& path);
  std::optional<Observation> next() { return reader_.next(); }

 private:
  std::ifstream file_;
  StreamReader reader_;
};

/// All observations of a stream file, grouped per item in first-appearance
/// order.
std::vector<std::pair<std::string, std::vector<double>>> read_stream_by_item(
    const std::filesystem::path& path);

}  // namespace satisrank
