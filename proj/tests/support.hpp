#pragma once

// Test-only generators and independent reference implementations. Nothing
// here calls into the library's numeric code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "repaudit/embedding_format.hpp"

namespace repaudit::testing {

using Rows = std::vector<std::vector<double>>;

inline std::vector<std::string> make_ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%03zu", i);
    ids.push_back(prefix + buf);
  }
  return ids;
}

inline EmbeddingSet make_set(const std::string& name, SetRole role,
                             const std::vector<std::vector<float>>& rows,
                             const std::string& id_prefix) {
  return EmbeddingSet::from_rows(name, role, rows, make_ids(id_prefix, rows.size()));
}

inline std::vector<std::vector<float>> gaussian_rows(std::mt19937_64& rng, std::size_t n,
                                                     std::size_t dim, double mean = 0.0,
                                                     double sd = 1.0) {
  std::normal_distribution<double> normal(mean, sd);
  std::vector<std::vector<float>> rows(n, std::vector<float>(dim));
  for (auto& r : rows) {
    for (auto& v : r) v = static_cast<float>(normal(rng));
  }
  return rows;
}

inline Rows to_double(const EmbeddingSet& s) {
  Rows rows(s.count(), std::vector<double>(s.dim));
  for (std::size_t i = 0; i < s.count(); ++i) {
    for (std::size_t k = 0; k < s.dim; ++k) rows[i][k] = s.values[i * s.dim + k];
  }
  return rows;
}

// Scalar double loop cosine.
inline double naive_cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double uv = 0, uu = 0, vv = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    uv += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  return std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0);
}

struct NaiveScore {
  Rows matrix;  // [real][gen]
  double top = -2.0;
  std::vector<double> per_gen_top;
  std::vector<std::size_t> per_gen_best;
  double average_top = 0.0;
};

inline NaiveScore naive_score(const EmbeddingSet& real, const EmbeddingSet& gen) {
  const Rows r = to_double(real);
  const Rows g = to_double(gen);
  NaiveScore out;
  out.matrix.assign(r.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      out.matrix[i][j] = naive_cosine(r[i], g[j]);
      out.top = std::max(out.top, out.matrix[i][j]);
    }
  }
  for (std::size_t j = 0; j < g.size(); ++j) {
    double best = -2.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (out.matrix[i][j] > best) {
        best = out.matrix[i][j];
        arg = i;
      }
    }
    out.per_gen_top.push_back(best);
    out.per_gen_best.push_back(arg);
    out.average_top += best;
  }
  out.average_top /= static_cast<double>(g.size());
  return out;
}

// ---- extended-precision Frechet oracle -------------------------------------

using LMat = std::vector<std::vector<long double>>;

struct TwoPassStats {
  std::vector<long double> mean;
  LMat cov;
};

inline TwoPassStats two_pass_stats(const EmbeddingSet& s) {
  const std::size_t n = s.count();
  const std::size_t d = s.dim;
  TwoPassStats st;
  st.mean.assign(d, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) st.mean[k] += s.values[i * d + k];
  }
  for (auto& m : st.mean) m /= static_cast<long double>(n);
  st.cov.assign(d, std::vector<long double>(d, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const long double da = s.values[i * d + a] - st.mean[a];
      for (std::size_t b = 0; b < d; ++b) {
        st.cov[a][b] += da * (s.values[i * d + b] - st.mean[b]);
      }
    }
  }
  for (auto& row : st.cov) {
    for (auto& v : row) v /= static_cast<long double>(n - 1);
  }
  return st;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix: a = V diag(w) V^T.
inline void jacobi_eigen(LMat a, std::vector<long double>& w, LMat& v) {
  const std::size_t n = a.size();
  v.assign(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0L;
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0.0L;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-36L) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0L) continue;
        const long double theta = (a[q][q] - a[p][p]) / (2.0L * a[p][q]);
        const long double t = (theta >= 0 ? 1.0L : -1.0L) /
                              (std::fabs(theta) + std::sqrt(theta * theta + 1.0L));
        const long double c = 1.0L / std::sqrt(t * t + 1.0L);
        const long double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const long double akp = a[k][p];
          const long double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double apk = a[p][k];
          const long double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double vkp = v[k][p];
          const long double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  w.resize(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = a[i][i];
}

inline LMat mat_mul(const LMat& a, const LMat& b) {
  const std::size_t n = a.size();
  LMat c(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

inline LMat psd_sqrt(const LMat& a) {
  std::vector<long double> w;
  LMat v;
  jacobi_eigen(a, w, v);
  const std::size_t n = a.size();
  LMat s(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        s[i][j] += v[i][k] * std::sqrt(std::max(w[k], 0.0L)) * v[j][k];
      }
    }
  }
  return s;
}

inline long double oracle_frechet(const std::vector<long double>& mp, const LMat& cp,
                                  const std::vector<long double>& mq, const LMat& cq) {
  long double mean_term = 0.0L;
  for (std::size_t k = 0; k < mp.size(); ++k) mean_term += (mp[k] - mq[k]) * (mp[k] - mq[k]);
  const LMat rp = psd_sqrt(cp);
  LMat inner = mat_mul(mat_mul(rp, cq), rp);
  for (std::size_t i = 0; i < inner.size(); ++i) {
    for (std::size_t j = i + 1; j < inner.size(); ++j) {
      inner[i][j] = inner[j][i] = 0.5L * (inner[i][j] + inner[j][i]);
    }
  }
  std::vector<long double> w;
  LMat v;
  jacobi_eigen(inner, w, v);
  long double trace = 0.0L;
  for (std::size_t k = 0; k < mp.size(); ++k) trace += cp[k][k] + cq[k][k];
  for (long double e : w) trace -= 2.0L * std::sqrt(std::max(e, 0.0L));
  return mean_term + std::max(trace, 0.0L);
}

inline double oracle_fvd(const EmbeddingSet& real, const EmbeddingSet& gen) {
  const auto p = two_pass_stats(real);
  const auto q = two_pass_stats(gen);
  return static_cast<double>(oracle_frechet(p.mean, p.cov, q.mean, q.cov));
}

}  // namespace repaudit::testing
