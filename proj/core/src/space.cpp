#include "stancelab/space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "stancelab/errors.hpp"
#include "json_util.hpp"

namespace stancelab {

AnswerMatrixBuild build_answer_matrix(const Dataset& dataset,
                                      const std::vector<std::string>& question_ids) {
  if (dataset.label_space.size() != 2) {
    throw DataError("answer matrix requires a binary dataset");
  }
  for (const auto& qid : question_ids) {
    if (dataset.find_question(qid) == nullptr) {
      throw DataError("answer matrix: unknown question '" + qid + "'");
    }
  }
  AnswerMatrixBuild out;
  out.matrix.column_ids = question_ids;
  for (const auto& unit : dataset.units) {
    std::vector<double> row;
    row.reserve(question_ids.size());
    bool complete = true;
    for (const auto& qid : question_ids) {
      auto it = unit.responses.find(qid);
      if (it == unit.responses.end()) {
        complete = false;
        break;
      }
      row.push_back(it->second == Stance::Yes ? 1.0 : 0.0);
    }
    if (complete) {
      out.matrix.row_ids.push_back(unit.unit_id);
      out.matrix.values.push_back(std::move(row));
    } else {
      out.excluded_ids.push_back(unit.unit_id);
    }
  }
  return out;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void orient_component(std::vector<double>& component, const AnswerMatrix& matrix,
                      const std::vector<double>& means,
                      const std::vector<std::size_t>& hint_rows, bool want_positive) {
  double score = 0.0;
  if (!hint_rows.empty()) {
    for (std::size_t r : hint_rows) {
      if (r >= matrix.values.size()) throw ConfigError("orientation hint row out of range");
      for (std::size_t j = 0; j < component.size(); ++j) {
        score += (matrix.values[r][j] - means[j]) * component[j];
      }
    }
  }
  if (score == 0.0) {
    // Fallback: largest-magnitude loading positive, first index on ties.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < component.size(); ++j) {
      if (std::abs(component[j]) > std::abs(component[arg])) arg = j;
    }
    score = want_positive ? component[arg] : -component[arg];
  }
  const bool flip = want_positive ? (score < 0.0) : (score > 0.0);
  if (flip) {
    for (double& v : component) v = -v;
  }
}

}  // namespace

SpaceModel fit_space(const AnswerMatrix& matrix, const OrientationHints& hints) {
  const std::size_t n = matrix.values.size();
  const std::size_t d = matrix.column_ids.size();
  if (n < 3) throw DataError("fit_space: need at least 3 rows");
  if (d < 2) throw DataError("fit_space: need at least 2 columns");
  for (const auto& row : matrix.values) {
    if (row.size() != d) throw DataError("fit_space: ragged answer matrix");
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix.values[i][j];
    }
  }
  const Eigen::RowVectorXd mu = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - mu;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw MetricError("fit_space: eigensolver failed");
  const Eigen::VectorXd evals = solver.eigenvalues();  // ascending
  const double total = std::max(evals.sum(), 0.0);
  const double lambda1 = evals(evals.size() - 1);
  const double lambda2 = evals(evals.size() - 2);
  if (total <= 0.0 || lambda2 <= 1e-12 * std::max(1.0, total)) {
    throw MetricError("fit_space: data rank below 2");
  }

  SpaceModel model;
  model.column_ids = matrix.column_ids;
  model.column_means.assign(mu.data(), mu.data() + mu.size());
  model.explained_variance = {lambda1, lambda2};
  model.explained_fraction = {lambda1 / total, lambda2 / total};
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd v = solver.eigenvectors().col(evals.size() - 1 - k);
    model.components[k].assign(v.data(), v.data() + v.size());
  }

  orient_component(model.components[0], matrix, model.column_means, hints.right_rows,
                   /*want_positive=*/true);
  orient_component(model.components[1], matrix, model.column_means,
                   hints.conservative_rows, /*want_positive=*/false);
  return model;
}

Point project(const SpaceModel& model, const std::vector<double>& answers) {
  if (answers.size() != model.column_means.size()) {
    throw DataError("project: vector length does not match the fitted space");
  }
  std::vector<double> centered(answers.size());
  for (std::size_t j = 0; j < answers.size(); ++j) {
    centered[j] = answers[j] - model.column_means[j];
  }
  return {dot(centered, model.components[0]), dot(centered, model.components[1])};
}

std::map<std::string, Point> displacement_vectors(
    const std::vector<DisplacementPair>& pairs) {
  std::map<std::string, std::pair<Point, int>> acc;
  for (const auto& p : pairs) {
    auto& [sum, count] = acc[p.group];
    sum.x += p.agent.x - p.human.x;
    sum.y += p.agent.y - p.human.y;
    ++count;
  }
  std::map<std::string, Point> out;
  for (const auto& [group, entry] : acc) {
    out[group] = {entry.first.x / entry.second, entry.first.y / entry.second};
  }
  return out;
}

Point inversion_center(const SpaceModel& model) {
  std::vector<double> ones_minus_2mu(model.column_means.size());
  for (std::size_t j = 0; j < ones_minus_2mu.size(); ++j) {
    ones_minus_2mu[j] = 1.0 - 2.0 * model.column_means[j];
  }
  return {dot(ones_minus_2mu, model.components[0]),
          dot(ones_minus_2mu, model.components[1])};
}

double inversion_reflection_check(const SpaceModel& model,
                                  const std::vector<std::vector<double>>& vectors) {
  const Point c = inversion_center(model);
  double max_dev = 0.0;
  for (const auto& v : vectors) {
    std::vector<double> flipped(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) flipped[j] = 1.0 - v[j];
    const Point a = project(model, v);
    const Point b = project(model, flipped);
    max_dev = std::max(max_dev, std::abs(a.x + b.x - c.x));
    max_dev = std::max(max_dev, std::abs(a.y + b.y - c.y));
  }
  return max_dev;
}

void save_space_model(const SpaceModel& model, const std::string& path) {
  detail::Json j;
  j["column_ids"] = model.column_ids;
  j["column_means"] = model.column_means;
  j["components"] = {model.components[0], model.components[1]};
  j["explained_variance"] = {model.explained_variance[0], model.explained_variance[1]};
  j["explained_fraction"] = {model.explained_fraction[0], model.explained_fraction[1]};
  detail::write_text_file(path, j.dump(2) + "\n");
}

SpaceModel load_space_model(const std::string& path) {
  const detail::Json j = detail::load_json_file(path);
  SpaceModel model;
  model.column_ids = detail::require(j, "column_ids", path).get<std::vector<std::string>>();
  model.column_means = detail::require(j, "column_means", path).get<std::vector<double>>();
  const auto& comps = detail::require(j, "components", path);
  const auto& ev = detail::require(j, "explained_variance", path);
  const auto& ef = detail::require(j, "explained_fraction", path);
  if (!comps.is_array() || comps.size() != 2 || ev.size() != 2 || ef.size() != 2) {
    throw DataError(path + ": expected two components");
  }
  for (int k = 0; k < 2; ++k) {
    model.components[k] = comps[k].get<std::vector<double>>();
    model.explained_variance[k] = ev[k].get<double>();
    model.explained_fraction[k] = ef[k].get<double>();
    if (model.components[k].size() != model.column_means.size()) {
      throw DataError(path + ": component length does not match column count");
    }
  }
  if (model.column_ids.size() != model.column_means.size()) {
    throw DataError(path + ": column ids and means disagree on length");
  }
  return model;
}

}  // namespace stancelab
