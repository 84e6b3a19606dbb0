#pragma once

// Real-to-real sine transforms (FFTW) that diagonalize second differences with
// homogeneous Dirichlet data:
//   node   - unknowns strictly between two boundary nodes (DST-I)
//   center - unknowns at cell centers, boundary on the faces (DST-II / DST-III)
// Plans are built with FFTW_ESTIMATE so the arithmetic is reproducible run to run.

#include <fftw3.h>

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "hsettle/core/error.hpp"
#include "hsettle/core/geometry.hpp"

namespace hsettle {

enum class SineKind { node, center };

namespace detail {

inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace detail

/// Eigenvalue of -(u_{j+1} - 2 u_j + u_{j-1}) (unit spacing) for mode m of an
/// n-point Dirichlet line.
inline double dirichlet_symbol(SineKind k, int n, int m) {
    const double theta = kPi * (m + 1) / (k == SineKind::node ? n + 1 : n);
    const double s = std::sin(0.5 * theta);
    return 4.0 * s * s;
}

/// Cosine of the mode angle, used by the Q1 finite-element symbols.
inline double dirichlet_cos(SineKind k, int n, int m) {
    return std::cos(kPi * (m + 1) / (k == SineKind::node ? n + 1 : n));
}

/// Separable sine transform on an array of dims[0] x ... x dims[D-1] points
/// (last index fastest). forward() maps values to mode coefficients, inverse()
/// maps back including the normalization.
template <int D>
class SineTransform {
public:
    SineTransform(std::array<int, D> dims, std::array<SineKind, D> kinds) : dims_(dims), kinds_(kinds) {
        size_ = 1;
        for (int d = 0; d < D; ++d) {
            if (dims[d] < 1) throw PreconditionError("sine transform needs positive sizes");
            size_ *= static_cast<std::size_t>(dims[d]);
        }
        buf_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * size_)));
        std::array<fftw_r2r_kind, D> fk, ik;
        norm_ = 1.0;
        for (int d = 0; d < D; ++d) {
            if (kinds[d] == SineKind::node) {
                fk[d] = ik[d] = FFTW_RODFT00;
                norm_ *= 2.0 * (dims[d] + 1);
            } else {
                fk[d] = FFTW_RODFT10;
                ik[d] = FFTW_RODFT01;
                norm_ *= 2.0 * dims[d];
            }
        }
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fwd_ = fftw_plan_r2r(D, dims_.data(), buf_.get(), buf_.get(), fk.data(), FFTW_ESTIMATE);
        inv_ = fftw_plan_r2r(D, dims_.data(), buf_.get(), buf_.get(), ik.data(), FFTW_ESTIMATE);
    }
    ~SineTransform() {
        std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    std::size_t size() const { return size_; }
    const std::array<int, D>& dims() const { return dims_; }
    const std::array<SineKind, D>& kinds() const { return kinds_; }

    /// Solve L u = f where L is diagonal in mode space with symbol(m_0, ..., m_{D-1}).
    template <class Symbol>
    void solve(std::vector<double>& data, Symbol&& symbol) {
        if (data.size() != size_) throw PreconditionError("sine transform size mismatch");
        std::copy(data.begin(), data.end(), buf_.get());
        fftw_execute(fwd_);
        std::array<int, D> m{};
        for (std::size_t q = 0; q < size_; ++q) {
            std::size_t rest = q;
            for (int d = D - 1; d >= 0; --d) {
                m[d] = static_cast<int>(rest % dims_[d]);
                rest /= dims_[d];
            }
            buf_.get()[q] /= symbol(m) * norm_;
        }
        fftw_execute(inv_);
        std::copy(buf_.get(), buf_.get() + size_, data.begin());
    }

private:
    struct FftwFree {
        void operator()(double* p) const { fftw_free(p); }
    };
    std::array<int, D> dims_;
    std::array<SineKind, D> kinds_;
    std::size_t size_ = 0;
    double norm_ = 1.0;
    std::unique_ptr<double, FftwFree> buf_;
    fftw_plan fwd_ = nullptr;
    fftw_plan inv_ = nullptr;
};

} // namespace hsettle
