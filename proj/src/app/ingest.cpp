#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "whitney/app.hpp"
#include "whitney/datagen.hpp"

namespace whitney::app {

using nlohmann::json;

namespace {

std::string where(const std::string& source, const std::string& field) { return source + ": field '" + field + "'"; }

std::vector<double> number_array(const json& a, const std::string& source, const std::string& field,
                                 std::optional<std::size_t> length) {
  if (!a.is_array()) throw ParseError(where(source, field) + " must be an array of numbers");
  if (length && a.size() != *length) {
    throw ParseError(where(source, field) + " has " + std::to_string(a.size()) + " entries, expected " +
                     std::to_string(*length));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(where(source, field + "[" + std::to_string(i) + "]") + " is not a number");
    out.push_back(a[i].get<double>());
  }
  return out;
}

std::vector<Point> point_array(const json& doc, const char* key, int dim, const std::string& source,
                               std::optional<std::size_t> count) {
  if (!doc.contains(key)) throw ParseError(where(source, key) + " is missing");
  const json& a = doc.at(key);
  if (!a.is_array()) throw ParseError(where(source, key) + " must be an array of arrays");
  if (count && a.size() != *count) {
    throw ParseError(where(source, key) + " has " + std::to_string(a.size()) + " entries, expected " +
                     std::to_string(*count));
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<double> v = number_array(a[i], source, std::string(key) + "[" + std::to_string(i) + "]",
                                         static_cast<std::size_t>(dim));
    out.push_back(Eigen::Map<const Vector>(v.data(), dim));
  }
  return out;
}

}  // namespace

Instance ingest_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t limit = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) line += text[i] == '\n';
    throw ParseError(source + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  if (!doc.contains("dim") || !doc.at("dim").is_number_integer() || doc.at("dim").get<long>() < 1) {
    throw ParseError(where(source, "dim") + " must be a positive integer");
  }
  const int dim = doc.at("dim").get<int>();
  std::vector<Point> sites = point_array(doc, "sites", dim, source, std::nullopt);
  if (!doc.contains("values")) throw ParseError(where(source, "values") + " is missing");
  std::vector<double> values = number_array(doc.at("values"), source, "values", sites.size());
  if (doc.contains("gradients")) {
    std::vector<Point> grads = point_array(doc, "gradients", dim, source, sites.size());
    std::vector<Jet> jets;
    for (std::size_t k = 0; k < sites.size(); ++k) jets.push_back({values[k], grads[k]});
    OneField field(dim, std::move(sites), std::move(jets));
    require_valid(field);
    return field;
  }
  FunctionData data(dim, std::move(sites), std::move(values));
  require_valid(data);
  return data;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Instance ingest(const std::string& path) { return ingest_text(read_file(path), path); }

Instance jittered(const Instance& inst, std::uint64_t seed) {
  if (const auto* f = std::get_if<OneField>(&inst)) {
    OneField out(f->dim(), jitter_sites(f->sites(), seed), f->jets());
    require_valid(out);
    return out;
  }
  const auto& data = std::get<FunctionData>(inst);
  FunctionData out(data.dim(), jitter_sites(data.sites(), seed), data.values());
  require_valid(out);
  return out;
}

std::vector<Point> read_queries(const std::string& text, int dim, const std::string& source) {
  std::vector<Point> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> coords;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      std::size_t a = line.find_first_not_of(" \t\r", pos);
      std::size_t b = line.find_last_not_of(" \t\r", end == 0 ? 0 : end - 1);
      double v = 0.0;
      const char* lo = line.data() + (a == std::string::npos || a >= end ? end : a);
      const char* hi = line.data() + (b == std::string::npos || b < pos ? end : b + 1);
      auto res = std::from_chars(lo, hi, v);
      if (lo >= hi || res.ec != std::errc() || res.ptr != hi) {
        throw ParseError(source + ":" + std::to_string(lineno) + ": bad coordinate");
      }
      coords.push_back(v);
      pos = end + 1;
    }
    if (static_cast<int>(coords.size()) != dim) {
      throw ParseError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                       " coordinates, got " + std::to_string(coords.size()));
    }
    out.push_back(Eigen::Map<const Vector>(coords.data(), dim));
  }
  return out;
}

}  // namespace whitney::app
