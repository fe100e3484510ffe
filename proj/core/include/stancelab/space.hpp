#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "stancelab/survey.hpp"

namespace stancelab {

// Binary answer matrix, Yes = 1 and No = 0. Kept free of linear-algebra
// types so the solver stays an implementation detail.
struct AnswerMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> column_ids;
  std::vector<std::vector<double>> values;  // rows x columns
};

// Units with a gap on any listed question are excluded, not imputed.
struct AnswerMatrixBuild {
  AnswerMatrix matrix;
  std::vector<std::string> excluded_ids;
};

AnswerMatrixBuild build_answer_matrix(const Dataset& dataset,
                                      const std::vector<std::string>& question_ids);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct SpaceModel {
  std::vector<std::string> column_ids;  // question order the model was fit on
  std::vector<double> column_means;
  std::array<std::vector<double>, 2> components;  // orthonormal rows
  std::array<double, 2> explained_variance;       // top-2 covariance eigenvalues
  std::array<double, 2> explained_fraction;       // share of total variance
};

// Row indices used to fix component signs: PC1 points toward the Right-group
// mean, PC2 away from the most conservative party's mean. Empty hints fall
// back to a fixed convention (largest-magnitude loading positive).
struct OrientationHints {
  std::vector<std::size_t> right_rows;
  std::vector<std::size_t> conservative_rows;
};

SpaceModel fit_space(const AnswerMatrix& matrix, const OrientationHints& hints = {});

Point project(const SpaceModel& model, const std::vector<double>& answers);

struct DisplacementPair {
  std::string group;
  Point human;
  Point agent;
};

// Mean (agent - human) per group.
std::map<std::string, Point> displacement_vectors(const std::vector<DisplacementPair>& pairs);

// project(1-v) + project(v) is the constant (1 - 2*mu) . components for every
// binary v; returns the largest per-coordinate deviation from that constant.
double inversion_reflection_check(const SpaceModel& model,
                                  const std::vector<std::vector<double>>& vectors);

// The constant itself, for reporting how close the reflection is to the origin.
Point inversion_center(const SpaceModel& model);

void save_space_model(const SpaceModel& model, const std::string& path);
SpaceModel load_space_model(const std::string& path);

}  // namespace stancelab
