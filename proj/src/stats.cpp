#include "lenslevel/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "lenslevel/csv.hpp"
#include "lenslevel/digest.hpp"

namespace lenslevel::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kConditionFloor = 1e-12;
constexpr double kRidgeScale = 1e-8;

void check_groups(std::span<const int> groups, std::size_t n, const char* what) {
  if (groups.size() != n) throw Error(std::string(what) + ": group labels do not match the rows");
  for (int g : groups)
    if (g != 0 && g != 1) throw Error(std::string(what) + ": group labels must be 0 or 1");
}

TestResult finish(double f, double df1, double df2) {
  TestResult t;
  t.statistic = f;
  t.df1 = df1;
  t.df2 = df2;
  t.p_value = f_survival(f, df1, df2);
  t.significant = t.p_value < kAlpha;
  return t;
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw Error("pearson: needs at least 2 rows");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const Matrix& m, std::vector<std::string> column_names) {
  if (m.rows() < 2) throw Error("pearson_matrix: needs at least 2 rows");
  if (column_names.size() != m.cols()) throw Error("pearson_matrix: column names do not match the matrix");
  const std::size_t p = m.cols();
  std::vector<std::vector<double>> cols(p);
  for (std::size_t c = 0; c < p; ++c) {
    cols[c] = m.column(c);
    bool constant = true;
    for (double v : cols[c]) constant = constant && v == cols[c][0];
    if (constant) log_warn("correlate: column '" + column_names[c] + "' is constant; its correlations are 0");
  }
  CorrelationMatrix out{std::move(column_names), Matrix(p, p)};
  for (std::size_t a = 0; a < p; ++a) {
    out.r(a, a) = 1.0;
    for (std::size_t b = a + 1; b < p; ++b) out.r(a, b) = out.r(b, a) = pearson(cols[a], cols[b]);
  }
  return out;
}

double f_survival(double f, double d1, double d2) {
  if (!(d1 > 0) || !(d2 > 0)) throw Error("f_survival: degrees of freedom must be positive");
  if (std::isnan(f)) throw Error("f_survival: F is NaN");
  if (f <= 0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

TestResult anova_oneway(std::span<const double> values, std::span<const int> groups) {
  check_groups(groups, values.size(), "anova");
  const std::size_t n = values.size();
  // Values are shifted by the first one so constant data yields exact zeros.
  const double pivot = n > 0 ? values[0] : 0.0;
  std::size_t count[2] = {0, 0};
  double sum[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    ++count[groups[i]];
    sum[groups[i]] += values[i] - pivot;
  }
  if (count[0] < 2 || count[1] < 2) throw Error("anova: each group needs at least 2 members");
  const double mean[2] = {sum[0] / static_cast<double>(count[0]), sum[1] / static_cast<double>(count[1])};
  const double grand = (sum[0] + sum[1]) / static_cast<double>(n);
  double ssw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = values[i] - pivot - mean[groups[i]];
    ssw += dev * dev;
  }
  double ssb = 0.0;
  for (int g = 0; g < 2; ++g) ssb += static_cast<double>(count[g]) * (mean[g] - grand) * (mean[g] - grand);

  const double df1 = 1.0;
  const double df2 = static_cast<double>(n) - 2.0;
  double f;
  if (ssw == 0.0)
    f = ssb == 0.0 ? 0.0 : kInf;
  else
    f = (ssb / df1) / (ssw / df2);
  return finish(f, df1, df2);
}

ManovaResult manova_two_group(const Matrix& m, std::span<const int> groups) {
  check_groups(groups, m.rows(), "manova");
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (p == 0) throw Error("manova: no features");
  std::size_t count[2] = {0, 0};
  for (int g : groups) ++count[g];
  if (count[0] == 0 || count[1] == 0) throw Error("manova: a group is empty");
  if (n < p + 2) throw Error("manova: needs more rows than features + 1 (" + std::to_string(n) + " rows, " +
                             std::to_string(p) + " features)");

  Eigen::VectorXd pivot(p);
  for (std::size_t j = 0; j < p; ++j) pivot(static_cast<Eigen::Index>(j)) = m(0, j);
  Eigen::VectorXd mean[2] = {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p)),
                             Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) mean[groups[i]](static_cast<Eigen::Index>(j)) += m(i, j) - pivot(static_cast<Eigen::Index>(j));
  for (int g = 0; g < 2; ++g) mean[g] /= static_cast<double>(count[g]);

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  Eigen::VectorXd dev(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      dev(jj) = m(i, j) - pivot(jj) - mean[groups[i]](jj);
    }
    S.selfadjointView<Eigen::Lower>().rankUpdate(dev);
  }
  S = S.selfadjointView<Eigen::Lower>();
  S /= static_cast<double>(n) - 2.0;
  Eigen::VectorXd d = mean[1] - mean[0];

  ManovaResult out;
  const double df1 = static_cast<double>(p);
  const double df2 = static_cast<double>(n) - static_cast<double>(p) - 1.0;

  // Rescale to unit diagonal; T^2 is invariant to it and the solve is better conditioned.
  for (Eigen::Index j = 0; j < S.rows(); ++j) {
    if (S(j, j) > 0.0) continue;
    if (d(j) != 0.0) {
      // A feature with no within-group spread but different group means separates perfectly.
      out.t_squared = kInf;
      out.wilks_lambda = 0.0;
      out.test = finish(kInf, df1, df2);
      return out;
    }
  }
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < S.rows(); ++j) scale(j) = S(j, j) > 0.0 ? 1.0 / std::sqrt(S(j, j)) : 1.0;
  Eigen::MatrixXd R = scale.asDiagonal() * S * scale.asDiagonal();
  Eigen::VectorXd dz = scale.asDiagonal() * d;

  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success || llt.rcond() < kConditionFloor) {
    const double trace = R.trace();
    out.ridge = trace > 0.0 ? kRidgeScale * trace / static_cast<double>(p) : kRidgeScale;
    R.diagonal().array() += out.ridge;
    llt.compute(R);
    if (llt.info() != Eigen::Success) throw Error("manova: pooled covariance is singular even after the ridge");
    log_warn("manova: pooled covariance is ill-conditioned; added ridge " + format_number(out.ridge));
  }
  const double quad = dz.dot(llt.solve(dz));
  const double n0 = static_cast<double>(count[0]), n1 = static_cast<double>(count[1]);
  out.t_squared = std::max(0.0, n0 * n1 / (n0 + n1) * quad);
  out.wilks_lambda = 1.0 / (1.0 + out.t_squared / (static_cast<double>(n) - 2.0));
  const double f = df2 / (df1 * (static_cast<double>(n) - 2.0)) * out.t_squared;
  out.test = finish(f, df1, df2);
  return out;
}

CharacterizationReport characterize(std::span<const int> classes, const FeatureMatrix& m, std::string label_source) {
  check_groups(classes, m.n_rows(), "characterize");
  CharacterizationReport r;
  r.label_source = std::move(label_source);
  r.feature_set = m.feature_set;
  for (int c : classes) (c != 0 ? r.n_professional : r.n_non_professional) += 1;
  if (r.n_professional == 0 || r.n_non_professional == 0)
    throw Error("characterize: the " + std::string(r.n_professional == 0 ? "professional" : "non-professional") +
                " class is empty");
  for (std::size_t c = 0; c < m.n_cols(); ++c) {
    const std::vector<double> col = m.values.column(c);
    FeatureComparison fc;
    fc.feature = m.column_names[c];
    for (std::size_t i = 0; i < col.size(); ++i) (classes[i] != 0 ? fc.mean_professional : fc.mean_non_professional) += col[i];
    fc.mean_professional /= static_cast<double>(r.n_professional);
    fc.mean_non_professional /= static_cast<double>(r.n_non_professional);
    fc.anova = anova_oneway(col, classes);
    r.features.push_back(std::move(fc));
  }
  r.manova = manova_two_group(m.values, classes);
  return r;
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationMatrix& c) {
  std::ostringstream out;
  std::vector<std::string> header{""};
  header.insert(header.end(), c.column_names.begin(), c.column_names.end());
  csv::write_row(out, header);
  for (std::size_t a = 0; a < c.column_names.size(); ++a) {
    std::vector<std::string> row{c.column_names[a]};
    for (std::size_t b = 0; b < c.column_names.size(); ++b) row.push_back(format_number(c.r(a, b)));
    csv::write_row(out, row);
  }
  write_file(path, out.str());
}

void write_correlation_long_csv(const std::filesystem::path& path, const CorrelationMatrix& c) {
  std::ostringstream out;
  csv::write_row(out, {"row", "column", "r"});
  for (std::size_t a = 0; a < c.column_names.size(); ++a)
    for (std::size_t b = 0; b < c.column_names.size(); ++b)
      csv::write_row(out, {c.column_names[a], c.column_names[b], format_number(c.r(a, b))});
  write_file(path, out.str());
}

void write_anova_csv(const std::filesystem::path& path, const CharacterizationReport& r) {
  std::ostringstream out;
  csv::write_row(out, {"feature", "F", "p", "significant"});
  for (const auto& f : r.features)
    csv::write_row(out, {f.feature, format_number(f.anova.statistic), format_number(f.anova.p_value),
                         f.anova.significant ? "true" : "false"});
  write_file(path, out.str());
}

void write_characterization_bars_csv(const std::filesystem::path& path, const CharacterizationReport& r) {
  std::ostringstream out;
  csv::write_row(out, {"feature", "class", "mean", "significant"});
  for (const auto& f : r.features) {
    const std::string sig = f.anova.significant ? "true" : "false";
    csv::write_row(out, {f.feature, "professional", format_number(f.mean_professional), sig});
    csv::write_row(out, {f.feature, "non_professional", format_number(f.mean_non_professional), sig});
  }
  write_file(path, out.str());
}

namespace {

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

nlohmann::ordered_json test_json(const TestResult& t) {
  nlohmann::ordered_json j;
  j["F"] = number_json(t.statistic);
  j["p_value"] = t.p_value;
  j["df"] = {t.df1, t.df2};
  j["significant"] = t.significant;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const CharacterizationReport& r) {
  nlohmann::ordered_json j;
  j["label_source"] = r.label_source;
  if (!r.prediction_source.empty()) j["prediction_source"] = r.prediction_source;
  j["feature_set"] = r.feature_set;
  j["alpha"] = kAlpha;
  j["n_professional"] = r.n_professional;
  j["n_non_professional"] = r.n_non_professional;
  nlohmann::ordered_json manova = test_json(r.manova.test);
  manova["hotelling_t2"] = number_json(r.manova.t_squared);
  manova["wilks_lambda"] = r.manova.wilks_lambda;
  manova["ridge"] = r.manova.ridge;
  j["manova"] = std::move(manova);
  auto& feats = j["features"] = nlohmann::ordered_json::array();
  for (const auto& f : r.features) {
    nlohmann::ordered_json fj;
    fj["feature"] = f.feature;
    fj["mean_professional"] = f.mean_professional;
    fj["mean_non_professional"] = f.mean_non_professional;
    fj["anova"] = test_json(f.anova);
    feats.push_back(std::move(fj));
  }
  return j;
}

std::string to_markdown(const CharacterizationReport& r) {
  std::ostringstream out;
  out << "# Professional vs non-professional characterization\n\n";
  out << "Classes from ";
  if (r.label_source == "predicted")
    out << "out-of-fold predictions" << (r.prediction_source.empty() ? "" : " of " + r.prediction_source);
  else
    out << "ground-truth labels";
  out << ", compared over the `" << r.feature_set << "` columns: " << r.n_professional << " professional, "
      << r.n_non_professional << " non-professional.\n\n";
  out << "MANOVA (Hotelling T^2): F = " << format_number(r.manova.test.statistic) << ", df = ("
      << format_number(r.manova.test.df1) << ", " << format_number(r.manova.test.df2)
      << "), p = " << format_number(r.manova.test.p_value) << ", Wilks lambda = " << format_number(r.manova.wilks_lambda)
      << (r.manova.test.significant ? ", significant" : ", not significant") << " at alpha = " << format_number(kAlpha)
      << ".\n\n";
  out << "Features significant at alpha = " << format_number(kAlpha) << " are in bold.\n\n";
  out << "| feature | professional mean | non-professional mean | F | p |\n";
  out << "|---|---|---|---|---|\n";
  for (const auto& f : r.features) {
    const std::string name = f.anova.significant ? "**" + f.feature + "**" : f.feature;
    out << "| " << name << " | " << format_number(f.mean_professional) << " | "
        << format_number(f.mean_non_professional) << " | " << format_number(f.anova.statistic) << " | "
        << format_number(f.anova.p_value) << " |\n";
  }
  return out.str();
}

}  // namespace lenslevel::stats
