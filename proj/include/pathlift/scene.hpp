#pragma once

#include "pathlift/expression.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pathlift {

/// Scene documents are trees of sections, scalars and arrays. Both the text
/// encoding and JSON decode to this tree.
using SceneTree = nlohmann::ordered_json;

using ExprMatrix = std::vector<std::vector<Expression>>;

struct ChartSpec {
  int dim = 0;
  std::string name;
  /// Per axis: nothing for an unbounded axis, else (lo, hi) constants.
  std::vector<std::optional<std::pair<Expression, Expression>>> bounds;
  /// Per axis: nothing, or the period of an angular coordinate.
  std::vector<std::optional<Expression>> periods;
  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;
};

struct PathSpec {
  Expression lo;
  Expression hi;
  std::vector<Expression> position;  // empty when only the domain is given
  std::vector<Expression> velocity;  // optional
  friend bool operator==(const PathSpec&, const PathSpec&) = default;
};

enum class TransportKind { Generator, Coefficients, Connection };

struct TransportSpec {
  TransportKind kind = TransportKind::Generator;
  ExprMatrix generator;     // entries in s
  ExprMatrix derivative;    // optional dF/ds, entries in s
  ExprMatrix coefficients;  // entries in s, x1..xn, v1..vn
  std::string connection;   // "flat", "sphere" or "custom"
  std::vector<ExprMatrix> christoffel;  // custom: [i][j][k] entries in x1..xn
  bool full_consistency = true;
  ExprMatrix covector_generator;         // tensor-product-only mode
  std::optional<Expression> scalar_f;    // tensor-product-only mode, in s
  friend bool operator==(const TransportSpec&, const TransportSpec&) = default;
};

struct TensorLiteral {
  int p = 0;
  int q = 0;
  std::vector<double> components;  // row-major, contravariant slots first
  friend bool operator==(const TensorLiteral&, const TensorLiteral&) = default;
};

struct TaskSpec {
  std::optional<Expression> s0;
  std::optional<Expression> t;
  std::vector<Expression> vector;
  std::vector<Expression> x0;
  std::vector<Expression> velocity0;
  std::optional<TensorLiteral> tensor;
  std::optional<int> grid;
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct OutputSpec {
  std::optional<std::string> format;  // "csv" or "json"
  std::optional<std::string> destination;
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct Scene {
  ChartSpec chart;
  std::optional<PathSpec> path;
  std::optional<TransportSpec> transport;
  TaskSpec task;
  std::optional<double> step;
  std::map<std::string, double> tolerances;
  OutputSpec output;
  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class SceneEncoding { Text, Json };

/// Parses the text encoding into a tree; throws ParseError.
SceneTree parse_scene_text(std::string_view text);
/// Prints a tree in the text encoding.
std::string format_scene_text(const SceneTree& tree);

/// Decodes and validates a tree; throws ValidationError on unknown keys,
/// wrong types, bad expressions, and dimension mismatches.
Scene scene_from_tree(const SceneTree& tree);
SceneTree scene_to_tree(const Scene& scene);

/// Accepts either encoding; JSON is recognized by a leading '{'.
Scene parse_scene(std::string_view text);
std::string serialize_scene(const Scene& scene, SceneEncoding encoding = SceneEncoding::Text);

/// Reads a nested-array tensor literal of depth p + q.
std::vector<double> flatten_tensor_literal(const SceneTree& value, int p, int q, int dim);
SceneTree nest_tensor_components(const std::vector<double>& components, int rank, int dim);

}  // namespace pathlift
