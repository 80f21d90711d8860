#include "ecoreport/sem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "ecoreport/distributions.hpp"
#include "ecoreport/error.hpp"

namespace ecoreport {

std::size_t SemModelSpec::free_parameter_count() const {
  std::size_t t = 0;
  for (const auto& l : loadings) t += l.status.free;
  for (const auto& c : latent_covariances) t += c.status.free;
  for (const auto& r : residuals) t += r.free;
  return t;
}

long long SemModelSpec::degrees_of_freedom() const {
  const auto p = static_cast<long long>(observed.size());
  return p * (p + 1) / 2 - static_cast<long long>(free_parameter_count());
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_names(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::size_t index_of(const std::vector<std::string>& names, std::string_view name,
                     const std::string& where, const char* kind) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw ValidationError(where + "unknown " + kind + " '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// "free" | "= 0.5" | "=0.5"
ParamStatus parse_status(std::string_view s, const std::string& where) {
  s = trim(s);
  if (s == "free") return ParamStatus::make_free();
  if (!s.empty() && s.front() == '=') {
    const double v = csv::parse_double(trim(s.substr(1)), where + "fixed value");
    if (!std::isfinite(v)) throw ValidationError(where + "fixed value must be finite");
    return ParamStatus::fixed(v);
  }
  throw ValidationError(where + "expected 'free' or '= value', got '" + std::string(s) + "'");
}

// Splits "lhs <op> rhs status" into (lhs, rhs, status text).
std::tuple<std::string, std::string, std::string> split_relation(std::string_view line,
                                                                 std::string_view op,
                                                                 const std::string& where) {
  const auto at = line.find(op);
  if (at == std::string_view::npos)
    throw ValidationError(where + "expected '" + std::string(op) + "'");
  const auto lhs = trim(line.substr(0, at));
  const auto rest = trim(line.substr(at + op.size()));
  const auto sp = rest.find_first_of(" \t=");
  if (lhs.empty() || sp == 0 || rest.empty())
    throw ValidationError(where + "malformed relation");
  const auto rhs = sp == std::string_view::npos ? rest : rest.substr(0, sp);
  const auto status = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp);
  if (trim(status).empty()) throw ValidationError(where + "missing 'free' or '= value'");
  return {std::string(lhs), std::string(rhs), std::string(status)};
}

}  // namespace

SemModelSpec parse_model(std::string_view text, std::string_view source) {
  SemModelSpec m;
  struct PendingLoading {
    std::string latent, observed;
    ParamStatus status;
    std::string where;
  };
  struct PendingCov {
    std::string a, b;
    ParamStatus status;
    std::string where;
  };
  struct PendingResidual {
    std::string observed;
    ParamStatus status;
    std::string where;
  };
  std::vector<PendingLoading> loadings;
  std::vector<PendingCov> covs;
  std::vector<PendingResidual> residuals;

  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";

    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known{"observed",    "latents",   "options",
                                               "loadings",    "covariances", "residuals"};
      if (!known.contains(section))
        throw ValidationError(where + "unknown section [" + section + "]");
      continue;
    }
    if (section.empty()) throw ValidationError(where + "content before the first section");

    if (section == "observed") {
      for (auto& n : split_names(line)) m.observed.push_back(std::move(n));
    } else if (section == "latents") {
      for (auto& n : split_names(line)) m.latents.push_back(std::move(n));
    } else if (section == "options") {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ValidationError(where + "expected key = value");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (key != "identification") throw ValidationError(where + "unknown option '" + std::string(key) + "'");
      if (value == "unit_variance") {
        m.identification = Identification::unit_variance;
      } else if (value == "first_loading") {
        m.identification = Identification::first_loading;
      } else {
        throw ValidationError(where + "identification must be unit_variance or first_loading");
      }
    } else if (section == "loadings") {
      auto [lat, obs, status] = split_relation(line, "->", where);
      loadings.push_back({lat, obs, parse_status(status, where), where});
    } else if (section == "covariances") {
      auto [a, b, status] = split_relation(line, "<->", where);
      covs.push_back({a, b, parse_status(status, where), where});
    } else if (section == "residuals") {
      const auto sp = line.find_first_of(" \t=");
      if (sp == std::string_view::npos || sp == 0)
        throw ValidationError(where + "expected '<observed> free|= value'");
      residuals.push_back({std::string(line.substr(0, sp)),
                           parse_status(line.substr(sp), where), where});
    }
  }

  if (m.observed.empty()) throw ValidationError(std::string(source) + ": no [observed] variables");
  {
    std::set<std::string> seen;
    for (const auto& n : m.observed)
      if (!seen.insert(n).second)
        throw ValidationError(std::string(source) + ": duplicate observed variable '" + n + "'");
    for (const auto& n : m.latents)
      if (!seen.insert(n).second)
        throw ValidationError(std::string(source) + ": duplicate variable name '" + n + "'");
  }
  for (const auto& l : loadings)
    m.loadings.push_back({index_of(m.latents, l.latent, l.where, "latent"),
                          index_of(m.observed, l.observed, l.where, "observed variable"),
                          l.status});
  for (const auto& c : covs)
    m.latent_covariances.push_back({index_of(m.latents, c.a, c.where, "latent"),
                                    index_of(m.latents, c.b, c.where, "latent"), c.status});
  std::vector<std::optional<ParamStatus>> res(m.observed.size());
  for (const auto& r : residuals) {
    const auto i = index_of(m.observed, r.observed, r.where, "observed variable");
    if (res[i]) throw ValidationError(r.where + "duplicate residual entry for '" + r.observed + "'");
    res[i] = r.status;
  }
  for (const auto& r : res) m.residuals.push_back(r.value_or(ParamStatus::make_free()));

  validate_model(m);
  return m;
}

SemModelSpec load_model(const std::filesystem::path& path) {
  return parse_model(csv::read_text(path), path.string());
}

void validate_model(SemModelSpec& m) {
  const std::size_t p = m.observed.size();
  const std::size_t k = m.latents.size();
  if (m.residuals.empty()) m.residuals.assign(p, ParamStatus::make_free());
  if (m.residuals.size() != p)
    throw ValidationError("every observed variable needs exactly one residual entry");
  for (std::size_t i = 0; i < p; ++i)
    if (!m.residuals[i].free && !(m.residuals[i].value > 0.0))
      throw ValidationError("fixed residual variance of '" + m.observed[i] + "' must be positive");

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& l : m.loadings) {
    if (l.latent >= k || l.observed >= p) throw ValidationError("loading index out of range");
    if (!seen.insert({l.latent, l.observed}).second)
      throw ValidationError("duplicate loading " + m.latents[l.latent] + " -> " +
                            m.observed[l.observed]);
  }
  seen.clear();
  for (const auto& c : m.latent_covariances) {
    if (c.a >= k || c.b >= k) throw ValidationError("covariance index out of range");
    if (!seen.insert(std::minmax(c.a, c.b)).second)
      throw ValidationError("duplicate covariance " + m.latents[c.a] + " <-> " + m.latents[c.b]);
  }

  for (std::size_t j = 0; j < k; ++j) {
    const std::string& name = m.latents[j];
    auto var = std::find_if(m.latent_covariances.begin(), m.latent_covariances.end(),
                            [&](const LatentCovSpec& c) { return c.a == j && c.b == j; });
    if (var == m.latent_covariances.end()) {
      m.latent_covariances.push_back({j, j,
                                      m.identification == Identification::unit_variance
                                          ? ParamStatus::fixed(1.0)
                                          : ParamStatus::make_free()});
      var = std::prev(m.latent_covariances.end());
    }
    if (!var->status.free && !(var->status.value > 0.0))
      throw ValidationError("fixed variance of latent '" + name + "' must be positive");

    auto first = std::find_if(m.loadings.begin(), m.loadings.end(),
                              [&](const LoadingSpec& l) { return l.latent == j; });
    if (first == m.loadings.end())
      throw ValidationError("latent '" + name + "' has no indicators");

    const auto has_fixed_scale = [&] {
      return std::any_of(m.loadings.begin(), m.loadings.end(), [&](const LoadingSpec& l) {
        return l.latent == j && !l.status.free && l.status.value != 0.0;
      });
    };
    if (var->status.free && !has_fixed_scale() &&
        m.identification == Identification::first_loading && first->status.free)
      first->status = ParamStatus::fixed(1.0);
    if (var->status.free && !has_fixed_scale())
      throw ValidationError("latent '" + name +
                            "' is not identified: fix its variance or one of its loadings");
  }

  if (m.degrees_of_freedom() < 0)
    throw ValidationError(fmt::format(
        "model has {} free parameters but only {} distinct covariances (df = {})",
        m.free_parameter_count(), p * (p + 1) / 2, m.degrees_of_freedom()));
}

std::vector<ParamInfo> free_parameters(const SemModelSpec& m) {
  std::vector<ParamInfo> out;
  for (std::size_t i = 0; i < m.loadings.size(); ++i) {
    const auto& l = m.loadings[i];
    if (l.status.free)
      out.push_back({ParamKind::loading, i, m.latents[l.latent] + " -> " + m.observed[l.observed]});
  }
  for (std::size_t i = 0; i < m.latent_covariances.size(); ++i) {
    const auto& c = m.latent_covariances[i];
    if (c.status.free)
      out.push_back({ParamKind::latent_covariance, i, m.latents[c.a] + " <-> " + m.latents[c.b]});
  }
  for (std::size_t i = 0; i < m.residuals.size(); ++i)
    if (m.residuals[i].free) out.push_back({ParamKind::residual, i, m.observed[i]});
  return out;
}

ModelMatrices model_matrices(const SemModelSpec& m, std::span<const double> params) {
  const std::size_t p = m.observed.size(), k = m.latents.size();
  const auto info = free_parameters(m);
  if (params.size() != info.size())
    throw ValidationError(fmt::format("expected {} free parameter values, got {}", info.size(),
                                      params.size()));
  ModelMatrices mm{Matrix(p, k), Matrix(k, k), Matrix(p, p)};
  for (const auto& l : m.loadings)
    if (!l.status.free) mm.lambda(l.observed, l.latent) = l.status.value;
  for (const auto& c : m.latent_covariances)
    if (!c.status.free) mm.phi(c.a, c.b) = mm.phi(c.b, c.a) = c.status.value;
  for (std::size_t i = 0; i < p; ++i)
    if (!m.residuals[i].free) mm.theta(i, i) = m.residuals[i].value;

  for (std::size_t t = 0; t < info.size(); ++t) {
    const double v = params[t];
    switch (info[t].kind) {
      case ParamKind::loading: {
        const auto& l = m.loadings[info[t].entry];
        mm.lambda(l.observed, l.latent) = v;
        break;
      }
      case ParamKind::latent_covariance: {
        const auto& c = m.latent_covariances[info[t].entry];
        mm.phi(c.a, c.b) = mm.phi(c.b, c.a) = v;
        break;
      }
      case ParamKind::residual:
        mm.theta(info[t].entry, info[t].entry) = v;
        break;
    }
  }
  return mm;
}

Matrix implied_covariance(const SemModelSpec& m, std::span<const double> params) {
  const ModelMatrices mm = model_matrices(m, params);
  for (std::size_t i = 0; i < mm.theta.rows(); ++i)
    if (!(mm.theta(i, i) > 0.0))
      throw BoundsError("residual variance of '" + m.observed[i] + "' must be positive");
  Matrix sigma = mm.lambda * mm.phi * mm.lambda.transposed() + mm.theta;
  for (std::size_t i = 0; i < sigma.rows(); ++i)
    for (std::size_t j = i + 1; j < sigma.cols(); ++j)
      sigma(i, j) = sigma(j, i) = 0.5 * (sigma(i, j) + sigma(j, i));
  return sigma;
}

double ml_discrepancy(const Matrix& s, const Matrix& sigma) {
  if (!s.square() || s.rows() != sigma.rows() || !sigma.square())
    throw ValidationError("ml_discrepancy: dimension mismatch");
  double logdet_s = 0.0, logdet_sigma = 0.0;
  try {
    logdet_s = spd_log_determinant(s);
  } catch (const ConditioningError&) {
    throw ConditioningError("sample covariance is not positive definite");
  }
  try {
    logdet_sigma = spd_log_determinant(sigma);
  } catch (const ConditioningError&) {
    throw ConditioningError("implied covariance is not positive definite");
  }
  const Matrix inv = inverse(sigma);
  double tr = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j) tr += s(i, j) * inv(j, i);
  return logdet_sigma + tr - logdet_s - static_cast<double>(s.rows());
}

MlObjective::MlObjective(const SemModelSpec& model, const Matrix& s)
    : model_(model), s_(s), info_(free_parameters(model)) {
  if (s.rows() != model.observed.size() || !s.square())
    throw ValidationError("sample covariance does not match the model's observed variables");
  require_symmetric(s, "sample covariance");
}

std::vector<double> MlObjective::to_natural(std::span<const double> z) const {
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t t = 0; t < info_.size(); ++t)
    if (info_[t].kind == ParamKind::residual) out[t] = std::exp(z[t]);
  return out;
}

std::vector<double> MlObjective::to_internal(std::span<const double> params) const {
  std::vector<double> out(params.begin(), params.end());
  for (std::size_t t = 0; t < info_.size(); ++t)
    if (info_[t].kind == ParamKind::residual) {
      if (!(params[t] > 0.0)) throw BoundsError("residual variance must be positive");
      out[t] = std::log(params[t]);
    }
  return out;
}

double MlObjective::value(std::span<const double> z) const {
  const auto params = to_natural(z);
  try {
    return ml_discrepancy(s_, implied_covariance(model_, params));
  } catch (const ConditioningError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const BoundsError&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<double> MlObjective::gradient(std::span<const double> z, double h) const {
  std::vector<double> x(z.begin(), z.end());
  std::vector<double> g(x.size(), 0.0);
  const double f0 = value(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    const double orig = x[i];
    x[i] = orig + step;
    const double fp = value(x);
    x[i] = orig - step;
    const double fm = value(x);
    x[i] = orig;
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * step);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - f0) / step;
    } else if (std::isfinite(fm)) {
      g[i] = (f0 - fm) / step;
    }
  }
  return g;
}

std::vector<double> starting_values(const SemModelSpec& m, const Matrix& s) {
  std::vector<double> out;
  for (const auto& info : free_parameters(m)) {
    switch (info.kind) {
      case ParamKind::loading:
        out.push_back(0.5);
        break;
      case ParamKind::latent_covariance: {
        const auto& c = m.latent_covariances[info.entry];
        out.push_back(c.a == c.b ? 1.0 : 0.0);
        break;
      }
      case ParamKind::residual:
        out.push_back(0.5 * s(info.entry, info.entry));
        break;
    }
  }
  return out;
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SemFit fit_model(const SemModelSpec& model, const Matrix& s, std::size_t n,
                 const FitOptions& opts) {
  const std::size_t p = model.observed.size();
  if (n <= p) throw ValidationError(fmt::format("fit_model: need N > p (N = {}, p = {})", n, p));
  if (model.degrees_of_freedom() < 0) throw ValidationError("fit_model: model has df < 0");
  try {
    cholesky(s);
  } catch (const ConditioningError&) {
    throw ConditioningError("sample covariance is not positive definite");
  }

  const MlObjective objective(model, s);
  const std::size_t dim = objective.dimension();
  std::vector<double> z = objective.to_internal(starting_values(model, s));
  double f = objective.value(z);
  if (!std::isfinite(f))
    throw ConditioningError("starting values give a non positive-definite implied covariance");
  std::vector<double> g = objective.gradient(z);

  // Inverse Hessian approximation, row-major.
  auto identity = [dim] {
    std::vector<double> h(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) h[i * dim + i] = 1.0;
    return h;
  };
  std::vector<double> h = identity();
  bool h_is_identity = true;

  SemFit fit;
  std::size_t iter = 0;
  for (; iter < opts.max_iterations && inf_norm(g) >= opts.gradient_tolerance; ++iter) {
    std::vector<double> d(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) d[i] -= h[i * dim + j] * g[j];
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      h = identity();
      h_is_identity = true;
      for (std::size_t i = 0; i < dim; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }

    double step = 1.0;
    std::vector<double> z_new(dim);
    double f_new = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      for (std::size_t i = 0; i < dim; ++i) z_new[i] = z[i] + step * d[i];
      f_new = objective.value(z_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (h_is_identity) break;  // no descent possible along the gradient
      h = identity();
      h_is_identity = true;
      continue;
    }

    const std::vector<double> g_new = objective.gradient(z_new);
    std::vector<double> sv(dim), yv(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      sv[i] = z_new[i] - z[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = dot(sv, yv);
    if (sy > 1e-12 * std::sqrt(dot(sv, sv) * dot(yv, yv))) {
      if (h_is_identity) {
        const double scale = sy / dot(yv, yv);
        for (double& v : h) v *= scale;
      }
      const double rho = 1.0 / sy;
      // H <- (I - rho s y') H (I - rho y s') + rho s s'
      std::vector<double> hy(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) hy[i] += h[i * dim + j] * yv[j];
      const double yhy = dot(yv, hy);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          h[i * dim + j] += -rho * (hy[i] * sv[j] + sv[i] * hy[j]) +
                            (rho * rho * yhy + rho) * sv[i] * sv[j];
      h_is_identity = false;
    }
    z = std::move(z_new);
    f = f_new;
    g = g_new;
  }

  fit.iterations = iter;
  fit.gradient_norm = inf_norm(g);
  fit.converged = fit.gradient_norm < opts.gradient_tolerance;
  fit.params = objective.to_natural(z);
  const auto info = objective.parameters();
  for (std::size_t t = 0; t < info.size(); ++t)
    fit.estimates.push_back({info[t].name, info[t].kind, fit.params[t]});
  fit.f_ml = std::max(f, 0.0);
  fit.n = n;
  fit.df = model.degrees_of_freedom();
  fit.chi_square = static_cast<double>(n - 1) * fit.f_ml;
  fit.p = fit.df > 0 ? chisq_sf(fit.chi_square, static_cast<double>(fit.df))
                     : std::numeric_limits<double>::quiet_NaN();

  if (!fit.converged)
    fit.warnings.push_back(fmt::format(
        "optimizer stopped after {} iterations with gradient norm {:.3g}", iter, fit.gradient_norm));
  for (std::size_t t = 0; t < info.size(); ++t) {
    if (info[t].kind == ParamKind::residual &&
        fit.params[t] < 1e-6 * s(info[t].entry, info[t].entry)) {
      fit.heywood = true;
      fit.warnings.push_back("Heywood case: residual variance of " + info[t].name +
                             " is at its zero bound");
    }
    if (info[t].kind == ParamKind::latent_covariance) {
      const auto& c = model.latent_covariances[info[t].entry];
      if (c.a == c.b && fit.params[t] <= 0.0) {
        fit.heywood = true;
        fit.warnings.push_back("improper solution: variance of latent " +
                               model.latents[c.a] + " is not positive");
      }
    }
  }
  return fit;
}

std::vector<StandardizedEstimate> standardized_estimates(const SemFit& fit,
                                                         const SemModelSpec& model,
                                                         const Matrix& s) {
  if (!fit.converged) throw PreconditionError("standardized_estimates: fit did not converge");
  const std::size_t p = model.observed.size();
  if (s.rows() != p) throw ValidationError("standardized_estimates: covariance size mismatch");
  for (std::size_t i = 0; i < p; ++i)
    if (!(s(i, i) > 0.0))
      throw ValidationError("observed variable '" + model.observed[i] + "' has zero variance");

  const ModelMatrices mm = model_matrices(model, fit.params);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto safe_sqrt = [nan](double v) { return v >= 0.0 ? std::sqrt(v) : nan; };

  std::vector<StandardizedEstimate> out;
  for (const auto& l : model.loadings) {
    const double raw = mm.lambda(l.observed, l.latent);
    out.push_back({model.latents[l.latent] + " -> " + model.observed[l.observed],
                   ParamKind::loading, raw,
                   raw * safe_sqrt(mm.phi(l.latent, l.latent)) / std::sqrt(s(l.observed, l.observed))});
  }
  for (const auto& c : model.latent_covariances) {
    const double raw = mm.phi(c.a, c.b);
    const double denom = safe_sqrt(mm.phi(c.a, c.a) * mm.phi(c.b, c.b));
    out.push_back({model.latents[c.a] + " <-> " + model.latents[c.b],
                   ParamKind::latent_covariance, raw, c.a == c.b ? 1.0 : raw / denom});
  }
  for (std::size_t i = 0; i < p; ++i)
    out.push_back({model.observed[i], ParamKind::residual, mm.theta(i, i),
                   mm.theta(i, i) / s(i, i)});
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  if (n < 2) throw ValidationError("sample covariance needs at least two cases");
  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) mean[j] += x(i, j);
  for (double& m : mean) m /= static_cast<double>(n);
  Matrix s(p, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < p; ++a) {
      const double da = x(i, a) - mean[a];
      for (std::size_t b = a; b < p; ++b) s(a, b) += da * (x(i, b) - mean[b]);
    }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      s(a, b) /= static_cast<double>(n - 1);
      s(b, a) = s(a, b);
    }
  return s;
}

namespace {

using nlohmann::json;

std::string_view kind_name(ParamKind k) {
  switch (k) {
    case ParamKind::loading: return "loading";
    case ParamKind::latent_covariance: return "covariance";
    case ParamKind::residual: return "residual";
  }
  return "unknown";
}

ParamKind parse_kind(const std::string& s) {
  if (s == "loading") return ParamKind::loading;
  if (s == "covariance") return ParamKind::latent_covariance;
  if (s == "residual") return ParamKind::residual;
  throw ValidationError("unknown parameter kind '" + s + "'");
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_nan(const json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string format_sem_json(const SemResult& r) {
  const SemFit& f = r.fit;
  json j;
  j["N"] = f.n;
  j["F_ML"] = f.f_ml;
  j["chi_square"] = f.chi_square;
  j["df"] = f.df;
  j["p"] = finite_or_null(f.p);
  j["acceptable_at_05"] = f.acceptable();
  j["convergence"] = {{"converged", f.converged},
                      {"iterations", f.iterations},
                      {"gradient_norm", f.gradient_norm},
                      {"heywood", f.heywood},
                      {"warnings", f.warnings}};
  json est = json::array();
  for (const auto& e : f.estimates)
    est.push_back({{"parameter", e.name}, {"kind", kind_name(e.kind)}, {"estimate", e.value}});
  j["estimates"] = std::move(est);
  json st = json::array();
  for (const auto& e : r.standardized)
    st.push_back({{"parameter", e.name},
                  {"kind", kind_name(e.kind)},
                  {"raw", finite_or_null(e.raw)},
                  {"standardized", finite_or_null(e.standardized)}});
  j["standardized"] = std::move(st);
  return j.dump(2) + "\n";
}

SemResult parse_sem_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed SEM JSON: ") + e.what());
  }
  try {
    SemResult r;
    SemFit& f = r.fit;
    f.n = j.at("N").get<std::size_t>();
    f.f_ml = j.at("F_ML").get<double>();
    f.chi_square = j.at("chi_square").get<double>();
    f.df = j.at("df").get<long long>();
    f.p = number_or_nan(j.at("p"));
    const auto& c = j.at("convergence");
    f.converged = c.at("converged").get<bool>();
    f.iterations = c.at("iterations").get<std::size_t>();
    f.gradient_norm = c.at("gradient_norm").get<double>();
    f.heywood = c.at("heywood").get<bool>();
    f.warnings = c.at("warnings").get<std::vector<std::string>>();
    for (const auto& e : j.at("estimates")) {
      f.estimates.push_back({e.at("parameter").get<std::string>(),
                             parse_kind(e.at("kind").get<std::string>()),
                             e.at("estimate").get<double>()});
      f.params.push_back(f.estimates.back().value);
    }
    for (const auto& e : j.at("standardized"))
      r.standardized.push_back({e.at("parameter").get<std::string>(),
                                parse_kind(e.at("kind").get<std::string>()),
                                number_or_nan(e.at("raw")), number_or_nan(e.at("standardized"))});
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("SEM JSON is missing fields: ") + e.what());
  }
}

void write_sem_json(const std::filesystem::path& path, const SemResult& r) {
  csv::write_file(path, format_sem_json(r));
}

SemResult read_sem_json(const std::filesystem::path& path) {
  return parse_sem_json(csv::read_text(path));
}

}  // namespace ecoreport
