#include "market_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace infmarket {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed document: ") + e.what());
  }
}

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorCode::Parse, std::string(what) + " must be numeric");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::Parse, std::string(what) + " must be finite");
  return d;
}

std::vector<double> number_array(const json& v, const char* what) {
  if (!v.is_array()) throw Error(ErrorCode::Parse, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(finite_number(e, what));
  return out;
}

Matrix number_matrix(const json& v, const char* what) {
  if (!v.is_array() || v.empty())
    throw Error(ErrorCode::Parse, std::string(what) + " must be a non-empty array of rows");
  const std::size_t cols = v.front().is_array() ? v.front().size() : 0;
  Matrix out(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = number_array(v[i], what);
    if (row.size() != cols) throw Error(ErrorCode::Parse, std::string(what) + " rows differ in length");
    std::copy(row.begin(), row.end(), out.row(i).begin());
  }
  return out;
}

template <class Range>
void require_nonneg(const Range& values, const char* what) {
  for (double v : values)
    if (v < 0.0) throw Error(ErrorCode::Parse, std::string(what) + " entries must be >= 0");
}

json matrix_json(const Matrix& x) {
  json rows = json::array();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

std::size_t count_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1)
    throw Error(ErrorCode::Parse, std::string("field '") + key + "' must be a positive integer");
  return doc[key].get<std::size_t>();
}

}  // namespace

MarketInstance market_from_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "market document must be an object");
  for (const char* key : {"n", "m", "family", "budgets", "valuations"})
    if (!doc.contains(key)) throw Error(ErrorCode::Parse, std::string("missing field '") + key + "'");

  const std::size_t n = count_field(doc, "n");
  const std::size_t m = count_field(doc, "m");
  if (!doc["family"].is_string()) throw Error(ErrorCode::Parse, "family must be a string");
  const Family family = parse_family(doc["family"].get<std::string>());

  std::vector<double> budgets = number_array(doc["budgets"], "budgets");
  Matrix valuations = number_matrix(doc["valuations"], "valuations");
  if (budgets.size() != n) throw Error(ErrorCode::Parse, "budgets length differs from n");
  if (valuations.rows() != n || valuations.cols() != m)
    throw Error(ErrorCode::Parse, "valuations must be an n x m array");

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw Error(ErrorCode::Parse, "edges must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
          e[0].get<long long>() < 0 || e[1].get<long long>() < 0)
        throw Error(ErrorCode::Parse, "each edge must be a pair of non-negative integers");
      edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
    }
  }
  return MarketInstance(family, std::move(budgets), std::move(valuations), std::move(edges));
}

std::string market_to_json(const MarketInstance& mkt) {
  nlohmann::ordered_json doc;
  doc["n"] = mkt.buyers();
  doc["m"] = mkt.goods();
  doc["family"] = std::string(family_name(mkt.family()));
  doc["budgets"] = std::vector<double>(mkt.budgets().begin(), mkt.budgets().end());
  doc["valuations"] = matrix_json(mkt.valuations());
  json edges = json::array();
  for (const Edge& e : mkt.edges()) edges.push_back({e.source, e.target});
  doc["edges"] = edges;
  return doc.dump(2);
}

Allocation allocation_from_json(const std::string& text) {
  const json doc = parse(text);
  if (doc.is_object() && !doc.contains("allocation"))
    throw Error(ErrorCode::Parse, "missing field 'allocation'");
  Allocation x = number_matrix(doc.is_object() ? doc["allocation"] : doc, "allocation");
  require_nonneg(x.data(), "allocation");
  return x;
}

std::string allocation_to_json(const Allocation& x) {
  nlohmann::ordered_json doc;
  doc["allocation"] = matrix_json(x);
  return doc.dump(2);
}

PriceVector prices_from_json(const std::string& text) {
  const json doc = parse(text);
  if (doc.is_object() && !doc.contains("prices"))
    throw Error(ErrorCode::Parse, "missing field 'prices'");
  PriceVector p = number_array(doc.is_object() ? doc["prices"] : doc, "prices");
  require_nonneg(p, "prices");
  return p;
}

std::string prices_to_json(const PriceVector& p) {
  nlohmann::ordered_json doc;
  doc["prices"] = p;
  return doc.dump(2);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  os << text << '\n';
  if (!os) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

MarketInstance load_market(const std::filesystem::path& path) {
  return market_from_json(read_text_file(path));
}

void save_market(const MarketInstance& mkt, const std::filesystem::path& path) {
  write_text_file(path, market_to_json(mkt));
}

}  // namespace infmarket
