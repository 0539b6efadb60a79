#include "diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "kernels/kernels.hpp"

namespace gridood::diff {

namespace {

bool want_grad(const Graph& g, std::initializer_list<const Tensor*> inputs) {
  if (!g.recording()) {
    return false;
  }
  for (const Tensor* t : inputs) {
    if (t->requires_grad()) {
      return true;
    }
  }
  return false;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": operand shapes differ");
  }
}

struct ConvDims {
  std::size_t cin, h, w;
  std::size_t cout, kh, kw;
  std::size_t ho, wo;
  std::size_t patch;  // cin*kh*kw
  std::size_t area;   // ho*wo
  int stride, padding;
};

ConvDims conv_dims(const Tensor& input, const Tensor& kernel,
                   const Tensor& bias, int stride, int padding) {
  if (input.shape().size() != 3) {
    throw DimensionError("conv2d: input must be [C,H,W]");
  }
  if (kernel.shape().size() != 4) {
    throw DimensionError("conv2d: kernel must be [C_out,C_in,kh,kw]");
  }
  if (bias.shape().size() != 1) {
    throw DimensionError("conv2d: bias must be one-dimensional");
  }
  ConvDims d{};
  d.cin = input.dim(0);
  d.h = input.dim(1);
  d.w = input.dim(2);
  d.cout = kernel.dim(0);
  d.kh = kernel.dim(2);
  d.kw = kernel.dim(3);
  d.stride = stride;
  d.padding = padding;
  if (kernel.dim(1) != d.cin) {
    throw DimensionError("conv2d: kernel C_in does not match input");
  }
  if (bias.dim(0) != d.cout) {
    throw DimensionError("conv2d: bias length does not match C_out");
  }
  if (d.kh % 2 == 0 || d.kw % 2 == 0) {
    throw DimensionError("conv2d: kernel extents must be odd");
  }
  if (stride < 1 || padding < 0) {
    throw DimensionError("conv2d: stride must be >=1 and padding >=0");
  }
  const long long ho =
      (static_cast<long long>(d.h) + 2LL * padding - static_cast<long long>(d.kh)) / stride + 1;
  const long long wo =
      (static_cast<long long>(d.w) + 2LL * padding - static_cast<long long>(d.kw)) / stride + 1;
  if (ho < 1 || wo < 1) {
    throw DimensionError("conv2d: output would be empty");
  }
  d.ho = static_cast<std::size_t>(ho);
  d.wo = static_cast<std::size_t>(wo);
  d.patch = d.cin * d.kh * d.kw;
  d.area = d.ho * d.wo;
  return d;
}

std::vector<double>& col_scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

std::vector<double>& dcol_scratch() {
  thread_local std::vector<double> buf;
  return buf;
}

// col[(ci*kh+ki)*kw+kj][oy*wo+ox] = input[ci][oy*s+ki-p][ox*s+kj-p], 0 if
// the source index falls in the zero padding.
void im2col(const ConvDims& d, const double* input, double* col) {
  for (std::size_t ci = 0; ci < d.cin; ++ci) {
    const double* plane = input + ci * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        double* row = col + ((ci * d.kh + ki) * d.kw + kj) * d.area;
        for (std::size_t oy = 0; oy < d.ho; ++oy) {
          const long long iy = static_cast<long long>(oy) * d.stride +
                               static_cast<long long>(ki) - d.padding;
          double* out = row + oy * d.wo;
          if (iy < 0 || iy >= static_cast<long long>(d.h)) {
            std::fill(out, out + d.wo, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(iy) * d.w;
          for (std::size_t ox = 0; ox < d.wo; ++ox) {
            const long long ix = static_cast<long long>(ox) * d.stride +
                                 static_cast<long long>(kj) - d.padding;
            out[ox] = (ix < 0 || ix >= static_cast<long long>(d.w))
                          ? 0.0
                          : src[static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

void col2im_add(const ConvDims& d, const double* col, double* dinput) {
  for (std::size_t ci = 0; ci < d.cin; ++ci) {
    double* plane = dinput + ci * d.h * d.w;
    for (std::size_t ki = 0; ki < d.kh; ++ki) {
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        const double* row = col + ((ci * d.kh + ki) * d.kw + kj) * d.area;
        for (std::size_t oy = 0; oy < d.ho; ++oy) {
          const long long iy = static_cast<long long>(oy) * d.stride +
                               static_cast<long long>(ki) - d.padding;
          if (iy < 0 || iy >= static_cast<long long>(d.h)) {
            continue;
          }
          double* dst = plane + static_cast<std::size_t>(iy) * d.w;
          const double* src = row + oy * d.wo;
          for (std::size_t ox = 0; ox < d.wo; ++ox) {
            const long long ix = static_cast<long long>(ox) * d.stride +
                                 static_cast<long long>(kj) - d.padding;
            if (ix >= 0 && ix < static_cast<long long>(d.w)) {
              dst[static_cast<std::size_t>(ix)] += src[ox];
            }
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(Graph& g, const Tensor& input, const Tensor& kernel,
              const Tensor& bias, int stride, int padding) {
  const ConvDims d = conv_dims(input, kernel, bias, stride, padding);
  const bool rg = want_grad(g, {&input, &kernel, &bias});
  Tensor out = Tensor::zeros({d.cout, d.ho, d.wo}, rg);

  std::vector<double>& col = col_scratch();
  if (col.size() < d.patch * d.area) col.resize(d.patch * d.area);
  im2col(d, input.values().data(), col.data());

  double* o = out.values_mut().data();
  kernels::gemm_nn(d.cout, d.area, d.patch, kernel.values().data(), col.data(),
                   o);
  const double* b = bias.values().data();
  for (std::size_t co = 0; co < d.cout; ++co) {
    double* row = o + co * d.area;
    for (std::size_t p = 0; p < d.area; ++p) {
      row[p] += b[co];
    }
  }
  check_finite(out.values(), "conv2d output");

  if (rg) {
    Tensor in_c = input, k_c = kernel, b_c = bias, out_c = out;
    g.record([in_c, k_c, b_c, out_c, d]() mutable {
      const double* dout = out_c.grad().data();
      if (b_c.requires_grad()) {
        double* db = b_c.grad_mut().data();
        for (std::size_t co = 0; co < d.cout; ++co) {
          double s = 0.0;
          const double* row = dout + co * d.area;
          for (std::size_t p = 0; p < d.area; ++p) {
            s += row[p];
          }
          db[co] += s;
        }
      }
      const bool need_col = k_c.requires_grad();
      if (need_col) {
        std::vector<double>& col = col_scratch();
        if (col.size() < d.patch * d.area) col.resize(d.patch * d.area);
        im2col(d, in_c.values().data(), col.data());
        // dK[Cout,patch] += dOut[Cout,area] * col[patch,area]^T
        kernels::gemm_nt(d.cout, d.patch, d.area, dout, col.data(),
                         k_c.grad_mut().data());
      }
      if (in_c.requires_grad()) {
        std::vector<double>& dcol = dcol_scratch();
        if (dcol.size() < d.patch * d.area) dcol.resize(d.patch * d.area);
        std::fill(dcol.begin(), dcol.begin() + d.patch * d.area, 0.0);
        // dcol[patch,area] = K[Cout,patch]^T * dOut[Cout,area]
        kernels::gemm_tn(d.patch, d.area, d.cout, k_c.values().data(), dout,
                         dcol.data());
        col2im_add(d, dcol.data(), in_c.grad_mut().data());
      }
    });
  }
  return out;
}

Tensor leaky_relu(Graph& g, const Tensor& x, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw DomainError("leaky_relu: slope must lie in (0,1)");
  }
  const bool rg = want_grad(g, {&x});
  Tensor out = Tensor::zeros(x.shape(), rg);
  kernels::active().leaky_relu_fwd(x.values().data(), out.values_mut().data(),
                                   x.size(), slope);
  check_finite(out.values(), "leaky_relu output");
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c, slope]() mutable {
      kernels::active().leaky_relu_bwd(x_c.values().data(),
                                       out_c.grad().data(),
                                       x_c.grad_mut().data(), x_c.size(),
                                       slope);
    });
  }
  return out;
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(Graph& g, const Tensor& x) {
  const bool rg = want_grad(g, {&x});
  Tensor out = Tensor::zeros(x.shape(), rg);
  auto xv = x.values();
  auto ov = out.values_mut();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    ov[i] = stable_sigmoid(xv[i]);
  }
  check_finite(out.values(), "sigmoid output");
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c]() mutable {
      auto y = out_c.values();
      auto dy = out_c.grad();
      auto dx = x_c.grad_mut();
      for (std::size_t i = 0; i < y.size(); ++i) {
        dx[i] += dy[i] * y[i] * (1.0 - y[i]);
      }
    });
  }
  return out;
}

namespace {

// max(z,0) - z*t + log1p(exp(-|z|)): the fused logit-space BCE element.
double bce_element(double z, double t) {
  return std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::fabs(z)));
}

Tensor bce_sum_impl(Graph& g, const Tensor& logits, const Tensor& targets,
                    const Tensor* weights) {
  require_same_shape(logits, targets, "bce");
  if (weights != nullptr) {
    require_same_shape(logits, *weights, "bce");
    if (weights->requires_grad()) {
      throw UsageError("bce: weights must not require gradients");
    }
  }
  for (double t : targets.values()) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("bce: target outside [0,1]");
    }
  }
  const bool rg = want_grad(g, {&logits, &targets});
  auto zv = logits.values();
  auto tv = targets.values();
  const double* wv = weights ? weights->values().data() : nullptr;
  double total = 0.0;
  for (std::size_t i = 0; i < zv.size(); ++i) {
    const double l = bce_element(zv[i], tv[i]);
    total += wv ? wv[i] * l : l;
  }
  Tensor out = Tensor::scalar(total, rg);
  check_finite(out.values(), "bce output");
  if (rg) {
    Tensor z_c = logits, t_c = targets, out_c = out;
    Tensor w_c = weights ? *weights : Tensor();
    g.record([z_c, t_c, w_c, out_c]() mutable {
      const double go = out_c.grad()[0];
      auto zv = z_c.values();
      auto tv = t_c.values();
      const double* wv = w_c.defined() ? w_c.values().data() : nullptr;
      if (z_c.requires_grad()) {
        auto dz = z_c.grad_mut();
        for (std::size_t i = 0; i < zv.size(); ++i) {
          const double w = wv ? wv[i] : 1.0;
          dz[i] += go * w * (stable_sigmoid(zv[i]) - tv[i]);
        }
      }
      if (t_c.requires_grad()) {
        auto dt = t_c.grad_mut();
        for (std::size_t i = 0; i < zv.size(); ++i) {
          const double w = wv ? wv[i] : 1.0;
          dt[i] += go * w * (-zv[i]);
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor bce_sum(Graph& g, const Tensor& logits, const Tensor& targets) {
  return bce_sum_impl(g, logits, targets, nullptr);
}

Tensor bce_sum_weighted(Graph& g, const Tensor& logits, const Tensor& targets,
                        const Tensor& weights) {
  return bce_sum_impl(g, logits, targets, &weights);
}

Tensor add(Graph& g, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  const bool rg = want_grad(g, {&a, &b});
  Tensor out = Tensor::zeros(a.shape(), rg);
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values_mut();
  for (std::size_t i = 0; i < av.size(); ++i) {
    ov[i] = av[i] + bv[i];
  }
  check_finite(out.values(), "add output");
  if (rg) {
    Tensor a_c = a, b_c = b, out_c = out;
    g.record([a_c, b_c, out_c]() mutable {
      auto go = out_c.grad();
      if (a_c.requires_grad()) {
        auto da = a_c.grad_mut();
        for (std::size_t i = 0; i < go.size(); ++i) da[i] += go[i];
      }
      if (b_c.requires_grad()) {
        auto db = b_c.grad_mut();
        for (std::size_t i = 0; i < go.size(); ++i) db[i] += go[i];
      }
    });
  }
  return out;
}

Tensor mul(Graph& g, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  const bool rg = want_grad(g, {&a, &b});
  Tensor out = Tensor::zeros(a.shape(), rg);
  auto av = a.values();
  auto bv = b.values();
  auto ov = out.values_mut();
  for (std::size_t i = 0; i < av.size(); ++i) {
    ov[i] = av[i] * bv[i];
  }
  check_finite(out.values(), "mul output");
  if (rg) {
    Tensor a_c = a, b_c = b, out_c = out;
    g.record([a_c, b_c, out_c]() mutable {
      auto go = out_c.grad();
      auto av = a_c.values();
      auto bv = b_c.values();
      if (a_c.requires_grad()) {
        auto da = a_c.grad_mut();
        for (std::size_t i = 0; i < go.size(); ++i) da[i] += go[i] * bv[i];
      }
      if (b_c.requires_grad()) {
        auto db = b_c.grad_mut();
        for (std::size_t i = 0; i < go.size(); ++i) db[i] += go[i] * av[i];
      }
    });
  }
  return out;
}

Tensor scale(Graph& g, const Tensor& x, double s) {
  const bool rg = want_grad(g, {&x});
  Tensor out = Tensor::zeros(x.shape(), rg);
  auto xv = x.values();
  auto ov = out.values_mut();
  for (std::size_t i = 0; i < xv.size(); ++i) {
    ov[i] = s * xv[i];
  }
  check_finite(out.values(), "scale output");
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c, s]() mutable {
      auto go = out_c.grad();
      auto dx = x_c.grad_mut();
      for (std::size_t i = 0; i < go.size(); ++i) dx[i] += s * go[i];
    });
  }
  return out;
}

Tensor sum_all(Graph& g, const Tensor& x) {
  const bool rg = want_grad(g, {&x});
  double s = 0.0;
  for (double v : x.values()) {
    s += v;
  }
  Tensor out = Tensor::scalar(s, rg);
  check_finite(out.values(), "sum output");
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c]() mutable {
      const double go = out_c.grad()[0];
      auto dx = x_c.grad_mut();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += go;
    });
  }
  return out;
}

Tensor linear(Graph& g, const Tensor& x, const Tensor& weight,
              const Tensor& bias) {
  if (x.shape().size() != 1 || weight.shape().size() != 2 ||
      bias.shape().size() != 1) {
    throw DimensionError("linear: expected x[C], weight[O,C], bias[O]");
  }
  const std::size_t cin = x.dim(0);
  const std::size_t cout = weight.dim(0);
  if (weight.dim(1) != cin || bias.dim(0) != cout) {
    throw DimensionError("linear: operand shapes disagree");
  }
  const bool rg = want_grad(g, {&x, &weight, &bias});
  Tensor out = Tensor::zeros({cout}, rg);
  auto xv = x.values();
  auto wv = weight.values();
  auto bv = bias.values();
  auto ov = out.values_mut();
  for (std::size_t o = 0; o < cout; ++o) {
    double s = bv[o];
    const double* wr = wv.data() + o * cin;
    for (std::size_t i = 0; i < cin; ++i) {
      s += wr[i] * xv[i];
    }
    ov[o] = s;
  }
  check_finite(out.values(), "linear output");
  if (rg) {
    Tensor x_c = x, w_c = weight, b_c = bias, out_c = out;
    g.record([x_c, w_c, b_c, out_c, cin, cout]() mutable {
      auto go = out_c.grad();
      auto xv = x_c.values();
      auto wv = w_c.values();
      if (b_c.requires_grad()) {
        auto db = b_c.grad_mut();
        for (std::size_t o = 0; o < cout; ++o) db[o] += go[o];
      }
      if (w_c.requires_grad()) {
        auto dw = w_c.grad_mut();
        for (std::size_t o = 0; o < cout; ++o) {
          double* dwr = dw.data() + o * cin;
          for (std::size_t i = 0; i < cin; ++i) dwr[i] += go[o] * xv[i];
        }
      }
      if (x_c.requires_grad()) {
        auto dx = x_c.grad_mut();
        for (std::size_t o = 0; o < cout; ++o) {
          const double* wr = wv.data() + o * cin;
          for (std::size_t i = 0; i < cin; ++i) dx[i] += go[o] * wr[i];
        }
      }
    });
  }
  return out;
}

Tensor spatial_mean(Graph& g, const Tensor& x) {
  if (x.shape().size() != 3) {
    throw DimensionError("spatial_mean: input must be [C,H,W]");
  }
  const std::size_t c = x.dim(0);
  const std::size_t area = x.dim(1) * x.dim(2);
  const bool rg = want_grad(g, {&x});
  Tensor out = Tensor::zeros({c}, rg);
  auto xv = x.values();
  auto ov = out.values_mut();
  for (std::size_t ci = 0; ci < c; ++ci) {
    double s = 0.0;
    const double* plane = xv.data() + ci * area;
    for (std::size_t p = 0; p < area; ++p) {
      s += plane[p];
    }
    ov[ci] = s / static_cast<double>(area);
  }
  check_finite(out.values(), "spatial_mean output");
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c, c, area]() mutable {
      auto go = out_c.grad();
      auto dx = x_c.grad_mut();
      const double inv = 1.0 / static_cast<double>(area);
      for (std::size_t ci = 0; ci < c; ++ci) {
        double* plane = dx.data() + ci * area;
        const double d = go[ci] * inv;
        for (std::size_t p = 0; p < area; ++p) plane[p] += d;
      }
    });
  }
  return out;
}

Tensor chw_to_whc(Graph& g, const Tensor& x) {
  if (x.shape().size() != 3) {
    throw DimensionError("chw_to_whc: input must be [C,H,W]");
  }
  const std::size_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const bool rg = want_grad(g, {&x});
  Tensor out = Tensor::zeros({w, h, c}, rg);
  auto xv = x.values();
  auto ov = out.values_mut();
  for (std::size_t ci = 0; ci < c; ++ci) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t xx = 0; xx < w; ++xx) {
        ov[(xx * h + y) * c + ci] = xv[(ci * h + y) * w + xx];
      }
    }
  }
  if (rg) {
    Tensor x_c = x, out_c = out;
    g.record([x_c, out_c, c, h, w]() mutable {
      auto go = out_c.grad();
      auto dx = x_c.grad_mut();
      for (std::size_t ci = 0; ci < c; ++ci) {
        for (std::size_t y = 0; y < h; ++y) {
          for (std::size_t xx = 0; xx < w; ++xx) {
            dx[(ci * h + y) * w + xx] += go[(xx * h + y) * c + ci];
          }
        }
      }
    });
  }
  return out;
}

}  // namespace gridood::diff
