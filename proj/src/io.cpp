#include "constshape/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace constshape {

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  fail(ErrorCode::Schema, "field '" + field + "': " + why);
}

const Json& require(const Json& j, const std::string& field) {
  if (!j.is_object()) fail(ErrorCode::Schema, "document is not an object");
  auto it = j.find(field);
  if (it == j.end()) schema_error(field, "missing");
  return *it;
}

}  // namespace

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.dim; ++i) a.push_back(v.c[i]);
  return a;
}

Vec vec_from_json(const Json& j, int dim) {
  if (!j.is_array()) fail(ErrorCode::Schema, "coordinate must be an array of integers");
  if (dim >= 0 && static_cast<int>(j.size()) != dim)
    fail(ErrorCode::Schema, "coordinate has the wrong dimension");
  std::vector<Coord> xs;
  for (const Json& x : j) {
    if (!x.is_number_integer()) fail(ErrorCode::Schema, "coordinates must be integers");
    xs.push_back(x.get<Coord>());
  }
  return Vec::of(xs);
}

Json pointset_to_json(const PointSet& s) {
  Json a = Json::array();
  for (const Vec& v : s) a.push_back(vec_to_json(v));
  return a;
}

PointSet pointset_from_json(const Json& j, int expected_dim) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::Schema, "point set must be a nonempty array");
  std::vector<Vec> pts;
  int dim = expected_dim;
  for (const Json& x : j) {
    Vec v = vec_from_json(x, dim);
    dim = v.dim;
    pts.push_back(v);
  }
  return PointSet(dim, std::move(pts));
}

Substitution substitution_from_json(const Json& j) {
  const Json& jd = require(j, "dimension");
  if (!jd.is_number_integer() || jd.get<int>() < 1 || jd.get<int>() > kMaxDim)
    schema_error("dimension", "must be an integer in [1, " + std::to_string(kMaxDim) + "]");
  int dim = jd.get<int>();

  const Json& jm = require(j, "matrix");
  if (!jm.is_array() || static_cast<int>(jm.size()) != dim)
    schema_error("matrix", "must be a " + std::to_string(dim) + "-row array");
  std::vector<std::vector<Coord>> rows;
  for (const Json& r : jm) {
    if (!r.is_array() || static_cast<int>(r.size()) != dim)
      schema_error("matrix", "rows must have length " + std::to_string(dim));
    std::vector<Coord> row;
    for (const Json& x : r) {
      if (!x.is_number_integer()) schema_error("matrix", "entries must be integers");
      row.push_back(x.get<Coord>());
    }
    rows.push_back(row);
  }

  const Json& js = require(j, "support");
  if (!js.is_array() || js.empty()) schema_error("support", "must be a nonempty array");
  std::vector<Vec> support_order;
  for (const Json& x : js) support_order.push_back(vec_from_json(x, dim));
  PointSet f1(dim, support_order);
  if (f1.size() != support_order.size()) schema_error("support", "has duplicate points");

  const Json& ja = require(j, "alphabet");
  if (!ja.is_array() || ja.empty()) schema_error("alphabet", "must be a nonempty array");
  std::vector<std::string> alphabet;
  std::set<std::string> names;
  for (const Json& x : ja) {
    if (!x.is_string()) schema_error("alphabet", "symbols must be strings");
    std::string name = x.get<std::string>();
    if (!names.insert(name).second) schema_error("alphabet", "symbol '" + name + "' repeats");
    alphabet.push_back(name);
  }

  Substitution sub;
  sub.alphabet = alphabet;
  sub.sys = make_system(Mat::of(rows), f1);
  sub.doc_support = support_order;

  const Json& jr = require(j, "rules");
  if (!jr.is_object()) schema_error("rules", "must be an object keyed by symbol");
  sub.rules.assign(alphabet.size(), {});
  for (std::size_t a = 0; a < alphabet.size(); ++a) {
    auto it = jr.find(alphabet[a]);
    if (it == jr.end()) schema_error("rules", "missing rule for symbol '" + alphabet[a] + "'");
    const Json& rule = *it;
    if (!rule.is_array() || rule.size() != support_order.size())
      schema_error("rules", "rule for symbol '" + alphabet[a] + "' must have length " +
                                std::to_string(support_order.size()));
    // Document order follows `support`; internal order follows the canonical
    // (sorted) F1.
    std::vector<int> cells(f1.size(), -1);
    for (std::size_t i = 0; i < support_order.size(); ++i) {
      if (!rule[i].is_string())
        schema_error("rules", "entries for symbol '" + alphabet[a] + "' must be strings");
      std::string name = rule[i].get<std::string>();
      int letter = -1;
      for (std::size_t b = 0; b < alphabet.size(); ++b)
        if (alphabet[b] == name) letter = static_cast<int>(b);
      if (letter < 0)
        schema_error("rules", "symbol '" + name + "' in the rule for '" + alphabet[a] +
                                  "' is not in the alphabet");
      cells[static_cast<std::size_t>(f1.index_of(support_order[i]))] = letter;
    }
    sub.rules[a] = cells;
  }
  return sub;
}

Json substitution_to_json(const Substitution& sub) {
  Json j;
  j["dimension"] = sub.dim();
  Json m = Json::array();
  for (int i = 0; i < sub.dim(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < sub.dim(); ++k) row.push_back(sub.sys.L.at(i, k));
    m.push_back(row);
  }
  j["matrix"] = m;
  Json sup = Json::array();
  const std::vector<Vec>& order =
      sub.doc_support.empty()
          ? std::vector<Vec>(sub.sys.F1.begin(), sub.sys.F1.end())
          : sub.doc_support;
  for (const Vec& v : order) sup.push_back(vec_to_json(v));
  j["support"] = sup;
  j["alphabet"] = sub.alphabet;
  Json rules = Json::object();
  for (std::size_t a = 0; a < sub.alphabet.size(); ++a) {
    Json rule = Json::array();
    for (const Vec& v : order) {
      int idx = sub.sys.F1.index_of(v);
      rule.push_back(sub.alphabet[static_cast<std::size_t>(sub.rules[a][static_cast<std::size_t>(idx)])]);
    }
    rules[sub.alphabet[a]] = rule;
  }
  j["rules"] = rules;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Schema, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Schema, "cannot write '" + path + "'");
  out << content;
}

namespace {
Json parse_json(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::Schema, what + " is not valid JSON");
  return j;
}
}  // namespace

Substitution load_substitution(const std::string& path) {
  return substitution_from_json(parse_json(read_file(path), path));
}

void save_substitution(const Substitution& sub, const std::string& path) {
  write_file(path, substitution_to_json(sub).dump(2) + "\n");
}

Pattern pattern_from_json(const Json& j, const Substitution& sub) {
  const Json& jd = require(j, "dimension");
  if (!jd.is_number_integer() || jd.get<int>() != sub.dim())
    schema_error("dimension", "must match the substitution dimension");
  PointSet sup = pointset_from_json(require(j, "support"), sub.dim());
  const Json& jc = require(j, "cells");
  if (!jc.is_array() || jc.size() != require(j, "support").size())
    schema_error("cells", "must align with support");
  // Cells follow the order of the support array as written.
  std::vector<Vec> order;
  for (const Json& x : require(j, "support")) order.push_back(vec_from_json(x, sub.dim()));
  if (sup.size() != order.size()) schema_error("support", "has duplicate points");
  std::vector<int> cells(sup.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!jc[i].is_string()) schema_error("cells", "entries must be symbol strings");
    cells[static_cast<std::size_t>(sup.index_of(order[i]))] =
        sub.letter_index(jc[i].get<std::string>());
  }
  return Pattern(sup, cells);
}

Json pattern_to_json(const Pattern& p, const std::vector<std::string>& alphabet, int dim) {
  Json j;
  j["dimension"] = dim;
  j["support"] = pointset_to_json(p.support);
  Json cells = Json::array();
  for (int c : p.cells) cells.push_back(alphabet[static_cast<std::size_t>(c)]);
  j["cells"] = cells;
  return j;
}

Pattern load_pattern(const std::string& path, const Substitution& sub) {
  return pattern_from_json(parse_json(read_file(path), path), sub);
}

BlockMap blockmap_from_json(const Json& j) {
  BlockMap m;
  const Json& jsrc = require(j, "source_alphabet");
  const Json& jtgt = require(j, "target_alphabet");
  if (!jsrc.is_array() || jsrc.empty()) schema_error("source_alphabet", "must be a nonempty array");
  if (!jtgt.is_array() || jtgt.empty()) schema_error("target_alphabet", "must be a nonempty array");
  for (const Json& x : jsrc) m.source_alphabet.push_back(x.get<std::string>());
  for (const Json& x : jtgt) m.target_alphabet.push_back(x.get<std::string>());

  const Json& js = require(j, "support");
  std::vector<Vec> order;
  for (const Json& x : js) order.push_back(vec_from_json(x, -1));
  m.support = PointSet(order.front().dim, order);
  if (m.support.size() != order.size()) schema_error("support", "has duplicate points");

  auto source_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < m.source_alphabet.size(); ++i)
      if (m.source_alphabet[i] == name) return static_cast<int>(i);
    schema_error("table", "unknown source symbol '" + name + "'");
  };
  auto target_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < m.target_alphabet.size(); ++i)
      if (m.target_alphabet[i] == name) return static_cast<int>(i);
    schema_error("table", "unknown target symbol '" + name + "'");
  };

  const Json& jt = require(j, "table");
  if (!jt.is_array()) schema_error("table", "must be an array of entries");
  for (const Json& e : jt) {
    const Json& pat = require(e, "pattern");
    if (!pat.is_array() || pat.size() != order.size())
      schema_error("table", "pattern must align with support");
    std::vector<int> cells(m.support.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i)
      cells[static_cast<std::size_t>(m.support.index_of(order[i]))] =
          source_index(pat[i].get<std::string>());
    m.table[cells] = target_index(require(e, "to").get<std::string>());
  }
  return m;
}

Json blockmap_to_json(const BlockMap& m, int dim) {
  (void)dim;
  Json j;
  j["source_alphabet"] = m.source_alphabet;
  j["target_alphabet"] = m.target_alphabet;
  j["support"] = pointset_to_json(m.support);
  Json table = Json::array();
  for (const auto& [cells, to] : m.table) {
    Json e;
    Json pat = Json::array();
    for (int c : cells) pat.push_back(m.source_alphabet[static_cast<std::size_t>(c)]);
    e["pattern"] = pat;
    e["to"] = m.target_alphabet[static_cast<std::size_t>(to)];
    table.push_back(e);
  }
  j["table"] = table;
  return j;
}

BlockMap load_blockmap(const std::string& path) {
  return blockmap_from_json(parse_json(read_file(path), path));
}

std::string render_ascii_points(const PointSet& s) {
  if (s.empty()) return "";
  if (s.dim() > 2) fail(ErrorCode::Schema, "ASCII rendering supports d <= 2");
  auto [lo, hi] = s.bounding_box();
  std::ostringstream os;
  if (s.dim() == 1) {
    for (Coord x = lo.c[0]; x <= hi.c[0]; ++x) os << (s.contains(Vec{x}) ? '#' : '.');
    os << '\n';
    return os.str();
  }
  for (Coord y = hi.c[1]; y >= lo.c[1]; --y) {
    for (Coord x = lo.c[0]; x <= hi.c[0]; ++x) os << (s.contains(Vec{x, y}) ? '#' : '.');
    os << '\n';
  }
  return os.str();
}

std::string render_ascii(const Pattern& p, const std::vector<std::string>& alphabet) {
  if (p.support.empty()) return "";
  if (p.support.dim() > 2) fail(ErrorCode::Schema, "ASCII rendering supports d <= 2");
  std::size_t width = 1;
  for (int c : p.cells) width = std::max(width, alphabet[static_cast<std::size_t>(c)].size());
  auto cell_text = [&](const Vec& v) {
    int letter;
    std::string s = p.tries_at(v, &letter) ? alphabet[static_cast<std::size_t>(letter)] : ".";
    while (s.size() < width) s = " " + s;
    return s;
  };
  auto [lo, hi] = p.support.bounding_box();
  std::ostringstream os;
  if (p.support.dim() == 1) {
    for (Coord x = lo.c[0]; x <= hi.c[0]; ++x) {
      if (x > lo.c[0] && width > 1) os << ' ';
      os << cell_text(Vec{x});
    }
    os << '\n';
    return os.str();
  }
  for (Coord y = hi.c[1]; y >= lo.c[1]; --y) {
    for (Coord x = lo.c[0]; x <= hi.c[0]; ++x) {
      if (x > lo.c[0] && width > 1) os << ' ';
      os << cell_text(Vec{x, y});
    }
    os << '\n';
  }
  return os.str();
}

namespace {
const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
                          "#98df8a", "#ff9896", "#c5b0d5", "#c49c94"};
}

std::string render_svg(const Pattern& p, const std::vector<std::string>& alphabet, double cell) {
  if (p.support.dim() != 2) fail(ErrorCode::Schema, "SVG rendering supports d = 2");
  auto [lo, hi] = p.support.bounding_box();
  double w = static_cast<double>(hi.c[0] - lo.c[0] + 1) * cell;
  double h = static_cast<double>(hi.c[1] - lo.c[1] + 1) * cell;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\">\n";
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    const Vec& v = p.support[i];
    double x = static_cast<double>(v.c[0] - lo.c[0]) * cell;
    double y = static_cast<double>(hi.c[1] - v.c[1]) * cell;
    os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
       << cell << "\" fill=\"" << kPalette[static_cast<std::size_t>(p.cells[i]) % 16]
       << "\"><title>" << alphabet[static_cast<std::size_t>(p.cells[i])] << "</title></rect>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string render_tile_svg(const ExpansionSystem& sys, int n, double scale) {
  if (sys.dim != 2) fail(ErrorCode::Schema, "tile rendering supports d = 2");
  PointSet fn = support_iterate(sys, n);
  Mat adj_pow = Mat::identity(sys.dim);
  Coord det_pow = 1;
  for (int i = 0; i < n; ++i) {
    adj_pow = adj_pow * sys.adj;
    det_pow = checked_mul(det_pow, sys.det);
  }
  std::ostringstream os;
  double r = scale / (2.0 * std::max(1.0, std::sqrt(static_cast<double>(fn.size()))));
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 4 * scale << "\" height=\""
     << 4 * scale << "\" viewBox=\"" << -2 * scale << " " << -2 * scale << " " << 4 * scale
     << " " << 4 * scale << "\">\n";
  for (const Vec& p : fn) {
    Vec num = adj_pow.apply(p);
    double x = scale * static_cast<double>(num.c[0]) / static_cast<double>(det_pow);
    double y = -scale * static_cast<double>(num.c[1]) / static_cast<double>(det_pow);
    os << "  <circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r << "\" fill=\"#1f77b4\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace constshape
