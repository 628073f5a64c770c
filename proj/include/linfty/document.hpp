#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "linfty/bundle.hpp"

namespace linfty {

using Json = nlohmann::ordered_json;

/// Named points for a chart, in the coordinate order of the chart.
struct PointsDoc {
  std::vector<std::string> coords;
  std::vector<Point> points;
};

/// A job references its inputs by path, relative to the job file.
struct JobSpec {
  std::string cmd;
  std::optional<std::string> input;
  std::optional<std::string> contraction;
  std::optional<std::string> points;
  std::optional<int> degrees;
  std::optional<int> weights;
};

using Document = std::variant<Structure<Rat>, BundleChart, Morphism<Rat>, BundleMorphism, ContractionData,
                              PointsDoc, JobSpec>;

/// kind tag of the document: structure, bundle, morphism, contraction, points, job.
std::string document_kind(const Document& d);

/// Strict schema: unknown fields, missing fields and malformed scalars raise
/// SchemaError naming the JSON path; structures are validated on parse.
Document parse_document(const std::string& text);
Document parse_document(const Json& j);
Document load_document(const std::filesystem::path& path);

/// Canonical text: two-space indentation, degrees ascending, words and
/// basis entries in canonical order, exponents lexicographic, trailing newline.
std::string serialize_document(const Document& d);
Json to_json(const Document& d);

// Building blocks shared with report rendering.
Json rat_json(const Rat& r);
Json poly_json(const Poly& p, size_t nvars);
Json space_json(const GradedSpace& s);
Json vec_json(const GradedSpace& target, const Vec<Rat>& v);
Json table_json(const GradedSpace& source, const GradedSpace& target, const MultiMap<Rat>& t);
Json poly_table_json(const GradedSpace& source, const GradedSpace& target, const MultiMap<Poly>& t, size_t nvars);
Json linear_map_json(const GradedMap<Rat>& m);
Json point_json(const std::vector<std::string>& coords, const Point& p);
Json matrix_json(const RatMatrix& m);

} // namespace linfty
