#pragma once

#include <string>

#include "constshape/blockmap.hpp"
#include "constshape/substitution.hpp"

#include "json.hpp"

namespace constshape {

using Json = nlohmann::ordered_json;

// Substitution documents: {dimension, matrix, support, alphabet, rules}.
// Field order is canonical on save; loading validates the schema strictly and
// names the offending field on error.
Substitution substitution_from_json(const Json& j);
Json substitution_to_json(const Substitution& sub);
Substitution load_substitution(const std::string& path);
void save_substitution(const Substitution& sub, const std::string& path);

// Pattern documents: {dimension, support, cells}.
Pattern pattern_from_json(const Json& j, const Substitution& sub);
Json pattern_to_json(const Pattern& p, const std::vector<std::string>& alphabet, int dim);
Pattern load_pattern(const std::string& path, const Substitution& sub);

// Block-map documents: {source_alphabet, target_alphabet, support, table}.
BlockMap blockmap_from_json(const Json& j);
Json blockmap_to_json(const BlockMap& m, int dim);
BlockMap load_blockmap(const std::string& path);

Json vec_to_json(const Vec& v);
Vec vec_from_json(const Json& j, int dim);
Json pointset_to_json(const PointSet& s);
PointSet pointset_from_json(const Json& j, int expected_dim = -1);

// Row-major ASCII grid for d <= 2; multi-character symbols are padded.
std::string render_ascii(const Pattern& p, const std::vector<std::string>& alphabet);
std::string render_ascii_points(const PointSet& s);
// SVG cells, one rect per point, colored by letter.
std::string render_svg(const Pattern& p, const std::vector<std::string>& alphabet,
                       double cell = 12.0);
// The rescaled support L^{-n}(F_n) drawn at the given scale.
std::string render_tile_svg(const ExpansionSystem& sys, int n, double scale = 256.0);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace constshape
