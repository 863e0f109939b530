#include "wprcn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace wprcn {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  check(a.shape() == b.shape(), std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                                    " vs " + shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] + b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](TensorNode& n) {
    auto& g = n.grad;
    auto& da = n.parents[0]->grad_buf();
    auto& db = n.parents[1]->grad_buf();
    for (std::size_t i = 0; i < g.size(); ++i) {
      da[i] += g[i];
      db[i] += g[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] - b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](TensorNode& n) {
    auto& g = n.grad;
    auto& da = n.parents[0]->grad_buf();
    auto& db = n.parents[1]->grad_buf();
    for (std::size_t i = 0; i < g.size(); ++i) {
      da[i] += g[i];
      db[i] -= g[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](TensorNode& n) {
    auto& g = n.grad;
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    auto& da = pa->grad_buf();
    auto& db = pb->grad_buf();
    for (std::size_t i = 0; i < g.size(); ++i) {
      da[i] += g[i] * pb->value[i];
      db[i] += g[i] * pa->value[i];
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * c;
  return make_op(a.shape(), std::move(v), {a}, [c](TensorNode& n) {
    auto& da = n.parents[0]->grad_buf();
    for (std::size_t i = 0; i < n.grad.size(); ++i) da[i] += n.grad[i] * c;
  });
}

Tensor relu(const Tensor& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.data()[i] > 0.0 ? x.data()[i] : 0.0;
  return make_op(x.shape(), std::move(v), {x}, [](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    const auto& xv = n.parents[0]->value;
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (xv[i] > 0.0) dx[i] += n.grad[i];
  });
}

Tensor tanh_op(const Tensor& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::tanh(x.data()[i]);
  return make_op(x.shape(), std::move(v), {x}, [](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      dx[i] += n.grad[i] * (1.0 - n.value[i] * n.value[i]);
  });
}

Tensor logistic(const Tensor& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + std::exp(-x.data()[i]));
  return make_op(x.shape(), std::move(v), {x}, [](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      dx[i] += n.grad[i] * n.value[i] * (1.0 - n.value[i]);
  });
}

Tensor log_floored(const Tensor& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::log(std::max(x.data()[i], kLogFloor));
  return make_op(x.shape(), std::move(v), {x}, [](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    const auto& xv = n.parents[0]->value;
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      if (xv[i] > kLogFloor) dx[i] += n.grad[i] / xv[i];
  });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  return make_op({}, {s}, {x}, [](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (auto& d : dx) d += n.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  check(x.size() > 0, "mean: empty tensor");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  const double inv = 1.0 / static_cast<double>(x.size());
  return make_op({}, {s * inv}, {x}, [inv](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (auto& d : dx) d += n.grad[0] * inv;
  });
}

Tensor concat(const std::vector<Tensor>& parts) {
  check(!parts.empty(), "concat: no parts");
  std::size_t total = 0;
  for (const auto& p : parts) {
    check(p.ndim() == 1, "concat: expects 1-d parts");
    total += p.size();
  }
  std::vector<double> v;
  v.reserve(total);
  for (const auto& p : parts) v.insert(v.end(), p.values().begin(), p.values().end());
  return make_op({total}, std::move(v), parts, [](TensorNode& n) {
    std::size_t off = 0;
    for (auto& p : n.parents) {
      auto& dp = p->grad_buf();
      for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += n.grad[off + i];
      off += dp.size();
    }
  });
}

Tensor row(const Tensor& x, std::size_t i) {
  check(x.ndim() == 2, "row: expects matrix");
  check(i < x.dim(0), "row: index out of range");
  const std::size_t c = x.dim(1);
  std::vector<double> v(x.data() + i * c, x.data() + (i + 1) * c);
  return make_op({c}, std::move(v), {x}, [i, c](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t j = 0; j < c; ++j) dx[i * c + j] += n.grad[j];
  });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  check(!rows.empty(), "stack_rows: no rows");
  const std::size_t c = rows[0].size();
  std::vector<double> v;
  v.reserve(rows.size() * c);
  for (const auto& r : rows) {
    check(r.ndim() == 1 && r.size() == c, "stack_rows: ragged rows");
    v.insert(v.end(), r.values().begin(), r.values().end());
  }
  return make_op({rows.size(), c}, std::move(v), rows, [c](TensorNode& n) {
    for (std::size_t r = 0; r < n.parents.size(); ++r) {
      auto& dp = n.parents[r]->grad_buf();
      for (std::size_t j = 0; j < c; ++j) dp[j] += n.grad[r * c + j];
    }
  });
}

Tensor transpose(const Tensor& x) {
  check(x.ndim() == 2, "transpose: expects matrix");
  const std::size_t r = x.dim(0), c = x.dim(1);
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) v[j * r + i] = x.data()[i * c + j];
  return make_op({c, r}, std::move(v), {x}, [r, c](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) dx[i * c + j] += n.grad[j * r + i];
  });
}

Tensor time_slice(const Tensor& x, std::size_t t) {
  check(x.ndim() == 2, "time_slice: expects [ch x L]");
  check(t < x.dim(1), "time_slice: index out of range");
  const std::size_t ch = x.dim(0), L = x.dim(1);
  std::vector<double> v(ch);
  for (std::size_t c = 0; c < ch; ++c) v[c] = x.data()[c * L + t];
  return make_op({ch}, std::move(v), {x}, [ch, L, t](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t c = 0; c < ch; ++c) dx[c * L + t] += n.grad[c];
  });
}

Tensor softmax(const Tensor& x) {
  check(x.ndim() == 1 || x.ndim() == 2, "softmax: expects vector or matrix");
  const std::size_t cols = x.ndim() == 1 ? x.size() : x.dim(1);
  const std::size_t rows = x.size() / cols;
  check(cols > 0, "softmax: empty axis");
  std::vector<double> v(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x.data() + r * cols;
    double* out = v.data() + r * cols;
    double mx = in[0];
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, in[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      out[j] = std::exp(in[j] - mx);
      z += out[j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[j] /= z;
  }
  return make_op(x.shape(), std::move(v), {x}, [rows, cols](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = n.value.data() + r * cols;
      const double* g = n.grad.data() + r * cols;
      double gy = 0.0;
      for (std::size_t j = 0; j < cols; ++j) gy += g[j] * y[j];
      for (std::size_t j = 0; j < cols; ++j) dx[r * cols + j] += y[j] * (g[j] - gy);
    }
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check(a.ndim() == 2 && b.ndim() == 2, "matmul: expects matrices");
  check(a.dim(1) == b.dim(0), "matmul: inner extents differ, " + shape_str(a.shape()) + " * " +
                                  shape_str(b.shape()));
  const std::size_t r = a.dim(0), s = a.dim(1), t = b.dim(1);
  std::vector<double> v(r * t, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < s; ++k) {
      const double av = a.data()[i * s + k];
      const double* brow = b.data() + k * t;
      double* vrow = v.data() + i * t;
      for (std::size_t j = 0; j < t; ++j) vrow[j] += av * brow[j];
    }
  return make_op({r, t}, std::move(v), {a, b}, [r, s, t](TensorNode& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    auto& da = pa->grad_buf();
    auto& db = pb->grad_buf();
    // da += g * b^T ; db += a^T * g
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < t; ++j) {
        const double gv = n.grad[i * t + j];
        if (gv == 0.0) continue;
        const double* brow = pb->value.data() + j;
        for (std::size_t k = 0; k < s; ++k) da[i * s + k] += gv * brow[k * t];
      }
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t i = 0; i < r; ++i) {
        const double av = pa->value[i * s + k];
        if (av == 0.0) continue;
        const double* grow = n.grad.data() + i * t;
        double* dbrow = db.data() + k * t;
        for (std::size_t j = 0; j < t; ++j) dbrow[j] += av * grow[j];
      }
  });
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  check(w.ndim() == 2 && x.ndim() == 1, "matvec: expects matrix, vector");
  check(w.dim(1) == x.size(), "matvec: extents differ");
  const std::size_t r = w.dim(0), c = w.dim(1);
  std::vector<double> v(r, 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    const double* wrow = w.data() + i * c;
    double acc = 0.0;
    for (std::size_t j = 0; j < c; ++j) acc += wrow[j] * x.data()[j];
    v[i] = acc;
  }
  return make_op({r}, std::move(v), {w, x}, [r, c](TensorNode& n) {
    auto& pw = n.parents[0];
    auto& px = n.parents[1];
    auto& dw = pw->grad_buf();
    auto& dx = px->grad_buf();
    for (std::size_t i = 0; i < r; ++i) {
      const double gv = n.grad[i];
      if (gv == 0.0) continue;
      const double* wrow = pw->value.data() + i * c;
      double* dwrow = dw.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) {
        dwrow[j] += gv * px->value[j];
        dx[j] += gv * wrow[j];
      }
    }
  });
}

Tensor affine(const Tensor& w, const Tensor& x, const Tensor& b) {
  return add(matvec(w, x), b);
}

Tensor dot(const Tensor& a, const Tensor& b) {
  check(a.ndim() == 1 && b.ndim() == 1 && a.size() == b.size(), "dot: extents differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return make_op({}, {s}, {a, b}, [](TensorNode& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    auto& da = pa->grad_buf();
    auto& db = pb->grad_buf();
    const double g = n.grad[0];
    for (std::size_t i = 0; i < da.size(); ++i) {
      da[i] += g * pb->value[i];
      db[i] += g * pa->value[i];
    }
  });
}

Tensor conv1d_causal(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t dilation) {
  check(dilation >= 1, "conv1d_causal: dilation must be positive");
  check(x.ndim() == 2, "conv1d_causal: input must be [ch x L]");
  check(w.ndim() == 3, "conv1d_causal: kernel must be [out x in x K]");
  check(w.dim(1) == x.dim(0), "conv1d_causal: channel mismatch");
  check(b.size() == w.dim(0), "conv1d_causal: bias extent mismatch");
  const std::size_t co = w.dim(0), ci = w.dim(1), K = w.dim(2), L = x.dim(1);
  check(K >= 1, "conv1d_causal: kernel extent must be >= 1");
  std::vector<double> v(co * L);
  for (std::size_t o = 0; o < co; ++o) {
    double* vrow = v.data() + o * L;
    std::fill(vrow, vrow + L, b.data()[o]);
    for (std::size_t c = 0; c < ci; ++c) {
      const double* xrow = x.data() + c * L;
      const double* wrow = w.data() + (o * ci + c) * K;
      for (std::size_t k = 0; k < K; ++k) {
        const double wv = wrow[k];
        if (wv == 0.0) continue;
        const std::size_t shift = (K - 1 - k) * dilation;  // taps look back in time
        if (shift >= L) continue;
        for (std::size_t t = shift; t < L; ++t) vrow[t] += wv * xrow[t - shift];
      }
    }
  }
  return make_op({co, L}, std::move(v), {x, w, b},
                 [co, ci, K, L, dilation](TensorNode& n) {
                   auto& px = n.parents[0];
                   auto& pw = n.parents[1];
                   auto& dx = px->grad_buf();
                   auto& dw = pw->grad_buf();
                   auto& db = n.parents[2]->grad_buf();
                   for (std::size_t o = 0; o < co; ++o) {
                     const double* grow = n.grad.data() + o * L;
                     for (std::size_t t = 0; t < L; ++t) db[o] += grow[t];
                     for (std::size_t c = 0; c < ci; ++c) {
                       const double* xrow = px->value.data() + c * L;
                       const double* wrow = pw->value.data() + (o * ci + c) * K;
                       double* dxrow = dx.data() + c * L;
                       double* dwrow = dw.data() + (o * ci + c) * K;
                       for (std::size_t k = 0; k < K; ++k) {
                         const std::size_t shift = (K - 1 - k) * dilation;
                         if (shift >= L) continue;
                         const double wv = wrow[k];
                         double acc = 0.0;
                         for (std::size_t t = shift; t < L; ++t) {
                           acc += grow[t] * xrow[t - shift];
                           dxrow[t - shift] += grow[t] * wv;
                         }
                         dwrow[k] += acc;
                       }
                     }
                   }
                 });
}

Tensor conv1d_same_vec(const Tensor& v, const Tensor& w) {
  check(v.ndim() == 1 && w.ndim() == 1, "conv1d_same_vec: expects vectors");
  const std::size_t n = v.size(), K = w.size();
  check(K % 2 == 1, "conv1d_same_vec: kernel extent must be odd");
  const std::size_t pad = K / 2;
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < K; ++k) {
      const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i + k) - static_cast<std::ptrdiff_t>(pad);
      if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) out[i] += w.data()[k] * v.data()[j];
    }
  return make_op({n}, std::move(out), {v, w}, [n, K, pad](TensorNode& nn) {
    auto& pv = nn.parents[0];
    auto& pw = nn.parents[1];
    auto& dv = pv->grad_buf();
    auto& dw = pw->grad_buf();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = nn.grad[i];
      if (g == 0.0) continue;
      for (std::size_t k = 0; k < K; ++k) {
        const std::ptrdiff_t j =
            static_cast<std::ptrdiff_t>(i + k) - static_cast<std::ptrdiff_t>(pad);
        if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) {
          dv[j] += g * pw->value[k];
          dw[k] += g * pv->value[j];
        }
      }
    }
  });
}

Tensor global_avg_pool(const Tensor& x) {
  check(x.ndim() == 2, "global_avg_pool: expects [ch x L]");
  return masked_avg_pool(x, x.dim(1));
}

Tensor masked_avg_pool(const Tensor& x, std::size_t true_len) {
  check(x.ndim() == 2, "masked_avg_pool: expects [ch x L]");
  const std::size_t ch = x.dim(0), L = x.dim(1);
  check(true_len >= 1 && true_len <= L, "masked_avg_pool: bad true length");
  std::vector<double> v(ch, 0.0);
  const double inv = 1.0 / static_cast<double>(true_len);
  for (std::size_t c = 0; c < ch; ++c) {
    const double* xrow = x.data() + c * L;
    double acc = 0.0;
    for (std::size_t t = 0; t < true_len; ++t) acc += xrow[t];
    v[c] = acc * inv;
  }
  return make_op({ch}, std::move(v), {x}, [ch, L, true_len, inv](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t c = 0; c < ch; ++c) {
      const double gv = n.grad[c] * inv;
      for (std::size_t t = 0; t < true_len; ++t) dx[c * L + t] += gv;
    }
  });
}

Tensor scale_channels(const Tensor& x, const Tensor& a) {
  check(x.ndim() == 2 && a.ndim() == 1 && a.size() == x.dim(0),
        "scale_channels: extents differ");
  const std::size_t ch = x.dim(0), L = x.dim(1);
  std::vector<double> v(x.size());
  for (std::size_t c = 0; c < ch; ++c) {
    const double av = a.data()[c];
    for (std::size_t t = 0; t < L; ++t) v[c * L + t] = x.data()[c * L + t] * av;
  }
  return make_op(x.shape(), std::move(v), {x, a}, [ch, L](TensorNode& n) {
    auto& px = n.parents[0];
    auto& pa = n.parents[1];
    auto& dx = px->grad_buf();
    auto& da = pa->grad_buf();
    for (std::size_t c = 0; c < ch; ++c) {
      const double av = pa->value[c];
      double acc = 0.0;
      for (std::size_t t = 0; t < L; ++t) {
        dx[c * L + t] += n.grad[c * L + t] * av;
        acc += n.grad[c * L + t] * px->value[c * L + t];
      }
      da[c] += acc;
    }
  });
}

Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                 bool training) {
  check(x.ndim() == 2, "batchnorm: expects [ch x L]");
  const std::size_t ch = x.dim(0), L = x.dim(1);
  check(L >= 1, "batchnorm: empty batch");
  check(gamma.size() == ch && beta.size() == ch, "batchnorm: affine extent mismatch");
  if (!state.initialized) {
    state.running_mean.assign(ch, 0.0);
    state.running_var.assign(ch, 1.0);
    state.initialized = true;
  }
  std::vector<double> mu(ch), var(ch);
  if (training) {
    for (std::size_t c = 0; c < ch; ++c) {
      const double* xrow = x.data() + c * L;
      double m = 0.0;
      for (std::size_t t = 0; t < L; ++t) m += xrow[t];
      m /= static_cast<double>(L);
      double s = 0.0;
      for (std::size_t t = 0; t < L; ++t) s += (xrow[t] - m) * (xrow[t] - m);
      mu[c] = m;
      var[c] = s / static_cast<double>(L);
      const double unbiased = s / static_cast<double>(L > 1 ? L - 1 : 1);
      state.running_mean[c] = (1.0 - state.momentum) * state.running_mean[c] + state.momentum * m;
      state.running_var[c] =
          (1.0 - state.momentum) * state.running_var[c] + state.momentum * unbiased;
    }
  } else {
    mu = state.running_mean;
    var = state.running_var;
  }
  const double eps = state.eps;
  std::vector<double> v(x.size());
  for (std::size_t c = 0; c < ch; ++c) {
    const double inv_std = 1.0 / std::sqrt(var[c] + eps);
    const double g = gamma.data()[c], b = beta.data()[c];
    for (std::size_t t = 0; t < L; ++t)
      v[c * L + t] = (x.data()[c * L + t] - mu[c]) * inv_std * g + b;
  }
  return make_op(
      x.shape(), std::move(v), {x, gamma, beta},
      [ch, L, mu, var, eps, training](TensorNode& n) {
        auto& px = n.parents[0];
        auto& pg = n.parents[1];
        auto& dx = px->grad_buf();
        auto& dgamma = pg->grad_buf();
        auto& dbeta = n.parents[2]->grad_buf();
        const double invL = 1.0 / static_cast<double>(L);
        for (std::size_t c = 0; c < ch; ++c) {
          const double inv_std = 1.0 / std::sqrt(var[c] + eps);
          const double* xrow = px->value.data() + c * L;
          const double* grow = n.grad.data() + c * L;
          double sum_g = 0.0, sum_gx = 0.0;
          for (std::size_t t = 0; t < L; ++t) {
            const double xh = (xrow[t] - mu[c]) * inv_std;
            sum_g += grow[t];
            sum_gx += grow[t] * xh;
          }
          dgamma[c] += sum_gx;
          dbeta[c] += sum_g;
          const double gw = pg->value[c] * inv_std;
          if (training) {
            for (std::size_t t = 0; t < L; ++t) {
              const double xh = (xrow[t] - mu[c]) * inv_std;
              dx[c * L + t] += gw * (grow[t] - sum_g * invL - xh * sum_gx * invL);
            }
          } else {
            for (std::size_t t = 0; t < L; ++t) dx[c * L + t] += gw * grow[t];
          }
        }
      });
}

Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng, bool training) {
  check(p >= 0.0 && p < 1.0, "dropout: rate must be in [0, 1)");
  if (!training || p == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  const double inv_keep = 1.0 / (1.0 - p);
  std::vector<double> mask(x.size());
  for (auto& m : mask) m = keep(rng) ? inv_keep : 0.0;
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.data()[i] * mask[i];
  return make_op(x.shape(), std::move(v), {x}, [mask = std::move(mask)](TensorNode& n) {
    auto& dx = n.parents[0]->grad_buf();
    for (std::size_t i = 0; i < n.grad.size(); ++i) dx[i] += n.grad[i] * mask[i];
  });
}

Tensor l1_loss(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "l1_loss");
  check(a.size() > 0, "l1_loss: empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
  const double inv = 1.0 / static_cast<double>(a.size());
  return make_op({}, {s * inv}, {a, b}, [inv](TensorNode& n) {
    auto& pa = n.parents[0];
    auto& pb = n.parents[1];
    auto& da = pa->grad_buf();
    auto& db = pb->grad_buf();
    const double g = n.grad[0] * inv;
    for (std::size_t i = 0; i < da.size(); ++i) {
      const double diff = pa->value[i] - pb->value[i];
      const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      da[i] += g * sgn;
      db[i] -= g * sgn;
    }
  });
}

Tensor cross_entropy_logits(const Tensor& logits, std::size_t target) {
  check(logits.ndim() == 1 && logits.size() > 0, "cross_entropy: expects logits vector");
  check(target < logits.size(), "cross_entropy: target out of range");
  double mx = logits.data()[0];
  for (std::size_t i = 1; i < logits.size(); ++i) mx = std::max(mx, logits.data()[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) z += std::exp(logits.data()[i] - mx);
  const double loss = std::log(z) + mx - logits.data()[target];
  return make_op({}, {loss}, {logits}, [target, mx, z](TensorNode& n) {
    auto& dl = n.parents[0]->grad_buf();
    const auto& lv = n.parents[0]->value;
    const double g = n.grad[0];
    for (std::size_t i = 0; i < dl.size(); ++i) {
      double p = std::exp(lv[i] - mx) / z;
      dl[i] += g * (p - (i == target ? 1.0 : 0.0));
    }
  });
}

}  // namespace wprcn
