#include "satisrank/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "satisrank/error.hpp"

namespace satisrank {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string at_line(const std::string& origin, std::int64_t line) {
  return origin + ":" + std::to_string(line) + ": ";
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Normal: return "normal";
    case Family::Uniform: return "uniform";
    case Family::LogNormal: return "lognormal";
    case Family::Empirical: return "empirical";
  }
  return "unknown";
}

void DistributionSpec::validate() const {
  if (!std::isfinite(param1) || !std::isfinite(param2)) {
    throw ArgumentError("data_io", "distribution parameters must be finite");
  }
  switch (family) {
    case Family::Normal:
      if (!(param2 > 0.0)) throw ArgumentError("data_io", "normal sd must be positive");
      break;
    case Family::Uniform:
      if (!(param1 < param2)) throw ArgumentError("data_io", "uniform needs low < high");
      break;
    case Family::LogNormal:
      if (!(param2 > 0.0)) throw ArgumentError("data_io", "lognormal sigma must be positive");
      break;
    case Family::Empirical:
      if (values.empty()) throw ArgumentError("data_io", "empirical distribution has no values");
      break;
  }
}

std::string DistributionSpec::to_string() const {
  if (family == Family::Empirical) {
    return "empirical:" + std::to_string(values.size()) + ":" + std::to_string(seed);
  }
  return std::string(family_name(family)) + ":" + format_double(param1) + ":" +
         format_double(param2) + ":" + std::to_string(seed);
}

DistributionSpec parse_distribution(std::string_view text) {
  const auto parts = split(trim(text), ':');
  if (parts.size() != 3 && parts.size() != 4) {
    throw ArgumentError("data_io", "distribution must look like FAMILY:P1:P2[:SEED], got '" +
                                       std::string(text) + "'");
  }
  DistributionSpec spec;
  const std::string_view fam = trim(parts[0]);
  if (fam == "normal") {
    spec.family = Family::Normal;
  } else if (fam == "uniform") {
    spec.family = Family::Uniform;
  } else if (fam == "lognormal") {
    spec.family = Family::LogNormal;
  } else {
    throw ArgumentError("data_io", "unknown distribution family '" + std::string(fam) + "'");
  }
  const auto p1 = to_double(parts[1]);
  const auto p2 = to_double(parts[2]);
  if (!p1 || !p2) throw ArgumentError("data_io", "cannot read distribution parameters in '" +
                                                     std::string(text) + "'");
  spec.param1 = *p1;
  spec.param2 = *p2;
  if (parts.size() == 4) {
    const std::string_view s = trim(parts[3]);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), spec.seed);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ArgumentError("data_io", "seed must be an unsigned integer in '" + std::string(text) + "'");
    }
  }
  spec.validate();
  return spec;
}

DistributionSpec with_seed(DistributionSpec spec, std::uint64_t seed) {
  spec.seed = seed;
  return spec;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t item, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ item) ^ (stream * 0xD6E8FEB86659FD93ULL));
}

Generator::Generator(DistributionSpec spec) : spec_(std::move(spec)), engine_(spec_.seed) {
  spec_.validate();
}

double Generator::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Generator::standard_normal() {
  if (cached_normal_) {
    const double z = *cached_normal_;
    cached_normal_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  cached_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t Generator::next_index(std::uint64_t n) {
  if (n == 0) throw ArgumentError("data_io", "cannot draw an index from an empty range");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Generator::next() {
  switch (spec_.family) {
    case Family::Normal: return spec_.param1 + spec_.param2 * standard_normal();
    case Family::Uniform: return spec_.param1 + (spec_.param2 - spec_.param1) * uniform01();
    case Family::LogNormal: return std::exp(spec_.param1 + spec_.param2 * standard_normal());
    case Family::Empirical: return spec_.values[next_index(spec_.values.size())];
  }
  return 0.0;
}

std::vector<double> generate_synthetic(const DistributionSpec& spec, std::int64_t n) {
  if (n < 1) throw ArgumentError("data_io", "n must be at least 1");
  Generator gen(spec);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = gen.next();
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<ItemBatch> parse_batches(std::istream& in, const std::string& origin) {
  std::string line;
  std::int64_t line_no = 0;
  bool header_seen = false;
  std::vector<ItemBatch> batches;
  std::map<std::string, std::size_t> where;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto cells = split(row, ',');
    if (!header_seen) {
      if (cells.size() != 3 || trim(cells[0]) != "item_id" || trim(cells[1]) != "target" ||
          trim(cells[2]) != "value") {
        throw ParseError("data_io", at_line(origin, line_no) + "expected header item_id,target,value");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) {
      throw ParseError("data_io", at_line(origin, line_no) + "expected 3 fields, got " +
                                      std::to_string(cells.size()));
    }
    const std::string id(trim(cells[0]));
    if (id.empty()) throw ParseError("data_io", at_line(origin, line_no) + "empty item_id");
    const auto target = to_double(cells[1]);
    const auto value = to_double(cells[2]);
    if (!target || !std::isfinite(*target)) {
      throw ParseError("data_io", at_line(origin, line_no) + "target is not a finite number");
    }
    if (!value || !std::isfinite(*value)) {
      throw ParseError("data_io", at_line(origin, line_no) + "value is not a finite number");
    }
    auto [it, fresh] = where.emplace(id, batches.size());
    if (fresh) {
      batches.push_back(ItemBatch{id, {}, *target});
    } else if (batches[it->second].target != *target) {
      throw ParseError("data_io", at_line(origin, line_no) + "target of item '" + id +
                                      "' changes from " + format_double(batches[it->second].target) +
                                      " to " + format_double(*target));
    }
    batches[it->second].samples.push_back(*value);
  }
  if (batches.empty()) throw ArgumentError("data_io", origin + ": no observations");
  return batches;
}

std::vector<ItemBatch> load_batches(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("data_io", "cannot open '" + path.string() + "'");
  return parse_batches(in, path.string());
}

void write_batches(std::ostream& out, const std::vector<ItemBatch>& batches) {
  out << "item_id,target,value\n";
  for (const auto& b : batches) {
    const std::string target = format_double(b.target);
    for (double v : b.samples) out << b.item_id << ',' << target << ',' << format_double(v) << '\n';
  }
}

void write_batches(const std::filesystem::path& path, const std::vector<ItemBatch>& batches) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("data_io", "cannot write '" + path.string() + "'");
  write_batches(out, batches);
  if (!out) throw ArgumentError("data_io", "write to '" + path.string() + "' failed");
}

StreamReader::StreamReader(std::istream& in, std::string origin)
    : in_(in), origin_(std::move(origin)) {}

std::optional<Observation> StreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto cells = split(row, ',');
    if (cells.size() != 2) {
      throw StreamError("data_io", at_line(origin_, line_) + "expected item_id,value");
    }
    if (line_ == 1 && trim(cells[0]) == "item_id" && trim(cells[1]) == "value") continue;
    const auto value = to_double(cells[1]);
    const std::string id(trim(cells[0]));
    if (id.empty() || !value || !std::isfinite(*value)) {
      throw StreamError("data_io", at_line(origin_, line_) + "malformed observation");
    }
    return Observation{id, *value};
  }
  return std::nullopt;
}

StreamFile::StreamFile(const std::filesystem::path& path)
    : file_(path), reader_(file_, path.string()) {
  if (!file_) throw StreamError("data_io", "cannot open '" + path.string() + "'");
}

std::vector<std::pair<std::string, std::vector<double>>> read_stream_by_item(
    const std::filesystem::path& path) {
  StreamFile file(path);
  std::vector<std::pair<std::string, std::vector<double>>> out;
  std::map<std::string, std::size_t> where;
  while (auto obs = file.next()) {
    auto [it, fresh] = where.emplace(obs->item_id, out.size());
    if (fresh) out.emplace_back(obs->item_id, std::vector<double>{});
    out[it->second].second.push_back(obs->value);
  }
  if (out.empty()) throw StreamError("data_io", "'" + path.string() + "' holds no observations");
  return out;
}

}  // namespace satisrank
