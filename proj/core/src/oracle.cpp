#include "eitsim/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"

namespace eitsim {

namespace {

constexpr int kDim = OperatorBasis::kDim;
constexpr cplx kI{0.0, 1.0};

/// Pair map between conjugate slots and real quadratures, u = E dx.
Eigen::MatrixXcd pair_to_real(int dim, int pairs) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(dim, dim);
    for (int k = 0; k < pairs; ++k) {
        e(2 * k, 2 * k) = 1.0;
        e(2 * k, 2 * k + 1) = 1.0;
        e(2 * k + 1, 2 * k) = -kI;
        e(2 * k + 1, 2 * k + 1) = kI;
    }
    return e;
}

Eigen::MatrixXcd pair_from_real(int dim, int pairs) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(dim, dim);
    for (int k = 0; k < pairs; ++k) {
        e(2 * k, 2 * k) = 0.5;
        e(2 * k, 2 * k + 1) = 0.5 * kI;
        e(2 * k + 1, 2 * k) = 0.5;
        e(2 * k + 1, 2 * k + 1) = -0.5 * kI;
    }
    return e;
}

Eigen::MatrixXd real_part_checked(const Eigen::MatrixXcd& m, const char* what) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (m.imag().cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1e-300)) {
        throw std::logic_error(std::string("real basis: ") + what +
                               " is not conjugation symmetric");
    }
    return m.real();
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Box-Muller over mt19937_64 so streams are identical across standard
/// libraries; std::normal_distribution is not pinned by the standard.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - std::ldexp(static_cast<double>(rng_() >> 11), -53);
        const double u2 = std::ldexp(static_cast<double>(rng_() >> 11), -53);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    void fill(Eigen::Ref<Eigen::VectorXd> v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = (*this)();
    }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Eigenvalue square root of a symmetric PSD matrix, tolerating roundoff
/// negatives up to tol * max eigenvalue.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& s, double tol, double* clip,
                           const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()));
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double top = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::VectorXd root = ev;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < -tol * top) {
            throw std::logic_error(std::string(what) +
                                   ": indefinite beyond roundoff");
        }
        if (clip && ev[i] < 0.0 && -ev[i] > *clip) *clip = -ev[i];
        root[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    return eig.eigenvectors() * root.asDiagonal();
}

/// Minimum-norm solution of A X + X A^T = S; marginal noise-free directions
/// get zero stationary spread, which is the linearization's own convention.
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& s) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) {
                k(i * n + j, l * n + j) += a(i, l);
                k(i * n + j, i * n + l) += a(j, l);
            }
    Eigen::VectorXd rhs(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rhs(i * n + j) = s(i, j);
    Eigen::VectorXd x = k.completeOrthogonalDecomposition().solve(rhs);
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = x(i * n + j);
    return 0.5 * (out + out.transpose());
}

}  // namespace

RealBasisModel real_basis_model(const LinearModel& m) {
    const Eigen::MatrixXcd e = pair_to_real(kDim, 5);
    const Eigen::MatrixXcd einv = pair_from_real(kDim, 5);
    const Eigen::MatrixXcd ein_inv = pair_from_real(4, 2);

    RealBasisModel r;
    r.A = real_part_checked(e * m.A * einv, "drift");
    r.B = real_part_checked(e * m.B * ein_inv, "input coupling");
    const Eigen::MatrixXcd ds = 0.5 * (m.D + m.D.transpose());
    const Eigen::MatrixXd sig =
        real_part_checked(e * ds * e.transpose(), "diffusion");
    r.clip = 0.0;
    r.L = psd_factor(sig, 1e-9, &r.clip, "symmetrized diffusion");
    return r;
}

OracleEstimate simulate_quadrature_covariance(const LinearModel& m, double omega,
                                              const OracleOptions& opt) {
    if (!m.stable) {
        throw std::invalid_argument(
            "oracle: steady state is dynamically unstable");
    }
    if (omega <= 0.0 || opt.trajectories < 1 || opt.segments_per_trajectory < 1) {
        throw std::invalid_argument("oracle: bad sampling options");
    }
    const RealBasisModel rb = real_basis_model(m);

    const double period = 2.0 * M_PI / omega;
    const double radius = m.A.eigenvalues().cwiseAbs().maxCoeff();
    double dt = opt.dt_cycle_fraction * period;
    if (radius > 0.0) dt = std::min(dt, opt.dt_rate_factor / radius);
    const long nbins = std::lround(std::ceil(opt.cycles_per_segment * period / dt));
    dt = opt.cycles_per_segment * period / static_cast<double>(nbins);

    // Augmented generator over (u, bin integral of u, input Brownian).
    const int naug = 2 * kDim + 4;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(naug, naug);
    gen.topLeftCorner(kDim, kDim) = -rb.A;
    gen.block(kDim, 0, kDim, kDim).setIdentity();
    Eigen::MatrixXd bn = Eigen::MatrixXd::Zero(naug, 4 + rb.L.cols());
    bn.topLeftCorner(kDim, 4) = rb.B;
    bn.block(0, 4, kDim, rb.L.cols()) = rb.L;
    bn.block(2 * kDim, 0, 4, 4).setIdentity();
    const Eigen::MatrixXd qc = bn * bn.transpose();

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * naug, 2 * naug);
    h.topLeftCorner(naug, naug) = gen * dt;
    h.topRightCorner(naug, naug) = qc * dt;
    h.bottomRightCorner(naug, naug) = -gen.transpose() * dt;
    const Eigen::MatrixXd he = h.exp();
    const Eigen::MatrixXd f = he.topLeftCorner(naug, naug);
    const Eigen::MatrixXd qd =
        he.topRightCorner(naug, naug) * f.transpose();
    double qclip = 0.0;
    const Eigen::MatrixXd lq = psd_factor(qd, 1e-9, &qclip, "bin covariance");

    const Eigen::MatrixXd f11 = f.topLeftCorner(kDim, kDim);
    const Eigen::MatrixXd f21_fields = f.block(kDim, 0, 4, kDim);

    const Eigen::MatrixXd sig_total = rb.B * rb.B.transpose() + rb.L * rb.L.transpose();
    const Eigen::MatrixXd xstat = stationary_covariance(rb.A, sig_total);
    double xclip = 0.0;
    const Eigen::MatrixXd lx = psd_factor(xstat, 1e-6, &xclip, "stationary covariance");

    const Eigen::Vector4d out_gain(std::sqrt(m.params.gamma1),
                                   std::sqrt(m.params.gamma1),
                                   std::sqrt(m.params.gamma2),
                                   std::sqrt(m.params.gamma2));

    // Hann window and bin-center phases, fixed per segment.
    Eigen::VectorXd window(nbins);
    for (long k = 0; k < nbins; ++k)
        window[k] = 0.5 * (1.0 - std::cos(2.0 * M_PI * k / nbins));
    const double norm = window.squaredNorm() * dt;

    OracleEstimate est;
    est.omega = omega;
    est.steps_per_segment = nbins;
    est.dt = dt;

    // Trajectory streams come from a fixed seed chain and land in per-index
    // slots, so the draws and the merge below cannot depend on the parallel
    // schedule.
    std::uint64_t mix = opt.seed;
    std::vector<std::uint64_t> stream(opt.trajectories);
    for (std::uint64_t& s : stream) s = splitmix64(mix);

    const int nseg = opt.segments_per_trajectory;
    std::vector<Eigen::Matrix4d> periodogram(
        static_cast<std::size_t>(opt.trajectories) * nseg);

    detail::parallel_for_indexed(opt.trajectories, [&](int traj) {
        GaussianSampler gauss(stream[traj]);
        Eigen::VectorXd z(lq.cols());
        Eigen::VectorXd noise(naug);
        Eigen::VectorXd u(kDim);
        gauss.fill(z.head(kDim));
        u = lx * z.head(kDim);
        for (int seg = 0; seg < nseg; ++seg) {
            Eigen::Vector4cd acc = Eigen::Vector4cd::Zero();
            for (long k = 0; k < nbins; ++k) {
                gauss.fill(z);
                noise.noalias() = lq * z;
                const Eigen::Vector4d record =
                    out_gain.cwiseProduct(f21_fields * u + noise.segment(kDim, 4)) -
                    noise.tail(4);
                const double phase = omega * (static_cast<double>(k) + 0.5) * dt;
                acc += window[k] * std::polar(1.0, phase) * record;
                u = f11 * u + noise.head(kDim);
            }
            periodogram[static_cast<std::size_t>(traj) * nseg + seg] =
                (acc * acc.adjoint()).real() / norm;
        }
    });

    Eigen::Matrix4d mean = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d m2 = Eigen::Matrix4d::Zero();
    long count = 0;
    for (const Eigen::Matrix4d& p : periodogram) {
        ++count;
        const Eigen::Matrix4d delta = p - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta.cwiseProduct(p - mean);
    }

    est.segments = count;
    est.V = mean;
    if (count > 1) {
        est.std_error =
            (m2 / static_cast<double>(count - 1) / static_cast<double>(count))
                .cwiseSqrt();
    }
    return est;
}

}  // namespace eitsim
