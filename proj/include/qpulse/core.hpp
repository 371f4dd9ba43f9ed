// core.hpp
// Value types for a driven two-level system: probability-amplitude states,
// 2x2 complex matrices, Pauli algebra, and occupation probabilities.
// Everything here is an immutable value; all operations are pure.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace qpulse {

using cplx = std::complex<double>;

// Error categories surfaced by the CLI as distinct exit codes.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PropagationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Energy splitting between the two unperturbed levels and the working value
/// of hbar. The zero point of energy is arbitrary, so the unperturbed levels
/// are taken as -delta_e/2 and +delta_e/2; delta_e carries no sign.
struct SystemParams {
    double delta_e;
    double hbar;

    explicit SystemParams(double delta_e_, double hbar_ = 1.0)
        : delta_e(delta_e_), hbar(hbar_) {
        if (!(delta_e >= 0.0) || !std::isfinite(delta_e))
            throw std::invalid_argument("SystemParams: delta_e must be finite and >= 0");
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw std::invalid_argument("SystemParams: hbar must be finite and > 0");
    }
};

/// General complex 2x2 matrix. Used both for Hamiltonian-shaped matrices and
/// for evolution operators; propagator-quality unitarity is asserted via
/// unitarity_defect() / is_unitary() where required.
struct Mat2 {
    cplx u11{0.0, 0.0};
    cplx u12{0.0, 0.0};
    cplx u21{0.0, 0.0};
    cplx u22{0.0, 0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
    static Mat2 pauli_y() { return {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0}; }
    static Mat2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }

    Mat2 operator*(const Mat2& o) const {
        return {u11 * o.u11 + u12 * o.u21, u11 * o.u12 + u12 * o.u22,
                u21 * o.u11 + u22 * o.u21, u21 * o.u12 + u22 * o.u22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {u11 + o.u11, u12 + o.u12, u21 + o.u21, u22 + o.u22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {u11 - o.u11, u12 - o.u12, u21 - o.u21, u22 - o.u22};
    }
    friend Mat2 operator*(cplx c, const Mat2& m) {
        return {c * m.u11, c * m.u12, c * m.u21, c * m.u22};
    }

    Mat2 adjoint() const {
        return {std::conj(u11), std::conj(u21), std::conj(u12), std::conj(u22)};
    }
    cplx trace() const { return u11 + u22; }
    cplx det() const { return u11 * u22 - u12 * u21; }

    double frobenius_norm() const {
        return std::sqrt(std::norm(u11) + std::norm(u12) + std::norm(u21) + std::norm(u22));
    }

    /// ||U†U - I||_F; zero for an exactly unitary matrix.
    double unitarity_defect() const {
        const Mat2 g = adjoint() * (*this);
        return (g - identity()).frobenius_norm();
    }

    /// Propagator check: U†U = I and |det U| = 1, both within tol.
    bool is_unitary(double tol = 1e-10) const {
        return unitarity_defect() <= tol && std::abs(std::abs(det()) - 1.0) <= tol;
    }
};

inline double frobenius_distance(const Mat2& a, const Mat2& b) {
    return (a - b).frobenius_norm();
}

/// exp(-i (hx*sx + hy*sy + hz*sz) * s) for real coefficients.
/// Closed form via cos/sin of the coefficient norm; exactly unitary up to
/// roundoff, which is what keeps long step products norm-preserving.
inline Mat2 pauli_rotation(double hx, double hy, double hz, double s) {
    const double r = std::sqrt(hx * hx + hy * hy + hz * hz);
    if (r == 0.0) return Mat2::identity();
    const double phi = r * s;
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    const double nx = hx / r, ny = hy / r, nz = hz / r;
    return {cplx(c, -sn * nz), cplx(-sn * ny, -sn * nx),
            cplx(sn * ny, -sn * nx), cplx(c, sn * nz)};
}

/// Normalized two-level state (a1, a2). Construction rejects states whose
/// norm deviates from 1 by more than tol; renormalization is never silent,
/// so a bad propagator cannot hide behind it.
class QubitState {
  public:
    QubitState(cplx a1, cplx a2, double tol = 1e-12) : a1_(a1), a2_(a2) {
        const double n = std::norm(a1_) + std::norm(a2_);
        if (std::abs(n - 1.0) > tol)
            throw std::invalid_argument("QubitState: |a1|^2 + |a2|^2 = " + std::to_string(n) +
                                        " is not 1 within tolerance");
    }

    static QubitState ground() { return QubitState(1.0, 0.0); }
    static QubitState excited() { return QubitState(0.0, 1.0); }

    cplx a1() const { return a1_; }
    cplx a2() const { return a2_; }

  private:
    cplx a1_;
    cplx a2_;
};

/// (P1, P2) = (|a1|^2, |a2|^2). Sums to 1 by the state invariant.
inline std::pair<double, double> populations(const QubitState& s) {
    return {std::norm(s.a1()), std::norm(s.a2())};
}

/// Matrix-vector product u * s, rejecting non-unitary u so that propagator
/// corruption surfaces at the point of use.
inline QubitState apply(const Mat2& u, const QubitState& s, double unitary_tol = 1e-10) {
    if (!u.is_unitary(unitary_tol))
        throw std::invalid_argument("apply: matrix failed the unitarity check");
    return QubitState(u.u11 * s.a1() + u.u12 * s.a2(),
                      u.u21 * s.a1() + u.u22 * s.a2());
}

/// Coefficients of m = c_i*I + c_x*sx + c_y*sy + c_z*sz.
/// For Hermitian m all four coefficients are real.
struct PauliDecomposition {
    cplx c_i;
    cplx c_x;
    cplx c_y;
    cplx c_z;
};

inline PauliDecomposition decompose_pauli(const Mat2& m) {
    // c_i = tr(m)/2, c_k = tr(sigma_k * m)/2
    return {0.5 * (m.u11 + m.u22),
            0.5 * (m.u12 + m.u21),
            0.5 * cplx(0.0, 1.0) * (m.u12 - m.u21),
            0.5 * (m.u11 - m.u22)};
}

inline Mat2 reassemble(const PauliDecomposition& d) {
    return {d.c_i + d.c_z, d.c_x - cplx(0.0, 1.0) * d.c_y,
            d.c_x + cplx(0.0, 1.0) * d.c_y, d.c_i - d.c_z};
}

/// H(t) = -(delta_e/2) sz + v sx  as a matrix, Hermitian by construction.
inline Mat2 hamiltonian(const SystemParams& params, double v) {
    return {-0.5 * params.delta_e, v, v, 0.5 * params.delta_e};
}

}  // namespace qpulse
