#include "tracelab/celliptic_operator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "tracelab/error.hpp"
#include "tracelab/parallel.hpp"

namespace tracelab {

// ---------------------------------------------------------------- operators

void DiffOperator::validate() const {
    if (n < 1 || n > 3) throw DomainError("operator dimension must be 1..3");
    if (N < 1 || M < 1) throw DomainError("operator component counts must be positive");
    if (static_cast<int>(A.size()) != n) throw DomainError("operator needs one matrix per variable");
    for (const auto& a : A)
        if (a.size() != static_cast<std::size_t>(M) * N) throw DomainError("coefficient matrix has the wrong size");
}

DiffOperator DiffOperator::gradient(int n) {
    DiffOperator op{"gradient", n, 1, n, {}};
    for (int j = 0; j < n; ++j) {
        std::vector<double> a(n, 0.0);
        a[j] = 1.0;
        op.A.push_back(a);
    }
    return op;
}

DiffOperator DiffOperator::symmetric_gradient_2d() {
    return DiffOperator{"symmetric_gradient", 2, 2, 3,
                        {{1.0, 0.0, 0.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 0.5, 0.0, 0.0, 1.0}}};
}

DiffOperator DiffOperator::cauchy_riemann() {
    return DiffOperator{"cauchy_riemann", 2, 2, 2, {{1.0, 0.0, 0.0, 1.0}, {0.0, -1.0, 1.0, 0.0}}};
}

DiffOperator DiffOperator::by_name(const std::string& name, int n) {
    if (name == "gradient") return gradient(n);
    if (name == "symmetric_gradient") {
        if (n != 2) throw DomainError("symmetric gradient is shipped for n = 2 only");
        return symmetric_gradient_2d();
    }
    if (name == "cauchy_riemann") {
        if (n != 2) throw DomainError("Cauchy-Riemann system needs n = 2");
        return cauchy_riemann();
    }
    throw DomainError("unknown operator '" + name + "'");
}

namespace {

Eigen::MatrixXcd symbol(const DiffOperator& op, std::span<const Complex> xi) {
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(op.M, op.N);
    for (int j = 0; j < op.n; ++j)
        for (int r = 0; r < op.M; ++r)
            for (int c = 0; c < op.N; ++c) S(r, c) += op.coeff(j, r, c) * xi[j];
    return S;
}

struct SymbolProbe {
    double sigma;
    std::vector<Complex> null_vector;
};

SymbolProbe probe(const DiffOperator& op, std::span<const Complex> xi) {
    const auto S = symbol(op, xi);
    SymbolProbe out;
    if (op.M < op.N) {
        out.sigma = 0.0;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullV);
        const auto v = svd.matrixV().col(op.N - 1);
        out.null_vector.assign(v.data(), v.data() + op.N);
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    out.sigma = s(s.size() - 1);
    const auto v = svd.matrixV().col(op.N - 1);
    out.null_vector.assign(v.data(), v.data() + op.N);
    return out;
}

}  // namespace

double symbol_min_singular(const DiffOperator& op, std::span<const Complex> xi) {
    op.validate();
    if (static_cast<int>(xi.size()) != op.n) throw DomainError("frequency has the wrong dimension");
    return probe(op, xi).sigma;
}

EllipticityVerdict is_c_elliptic(const DiffOperator& op, std::size_t sample_count, std::uint64_t seed) {
    op.validate();
    const int n = op.n;
    std::vector<std::vector<Complex>> probes;
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex I(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        std::vector<Complex> e(n, 0.0);
        e[k] = 1.0;
        probes.push_back(e);
        for (int l = k + 1; l < n; ++l) {
            for (Complex phase : {I, -I, Complex(1.0), Complex(-1.0)}) {
                std::vector<Complex> x(n, 0.0);
                x[k] = r;
                x[l] = r * phase;
                probes.push_back(x);
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t s = 0; s < sample_count; ++s) {
        std::vector<Complex> x(n);
        double norm2 = 0.0;
        for (auto& c : x) {
            c = Complex(gauss(rng), gauss(rng));
            norm2 += std::norm(c);
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : x) c *= inv;
        probes.push_back(std::move(x));
    }

    EllipticityVerdict v;
    v.samples = probes.size();
    v.min_singular = std::numeric_limits<double>::infinity();
    for (const auto& x : probes) {
        const auto p = probe(op, x);
        if (p.sigma < v.min_singular) {
            v.min_singular = p.sigma;
            v.witness = x;
            v.null_vector = p.null_vector;
        }
    }
    v.likely_elliptic = v.min_singular >= ellipticity_threshold;
    return v;
}

// ---------------------------------------------------------------- polynomials

std::vector<std::array<int, 3>> monomials(int n, int d) {
    std::vector<std::array<int, 3>> out;
    for (int total = 0; total <= d; ++total) {
        if (n == 1) {
            out.push_back({total, 0, 0});
        } else if (n == 2) {
            for (int a = total; a >= 0; --a) out.push_back({a, total - a, 0});
        } else {
            for (int a = total; a >= 0; --a)
                for (int b = total - a; b >= 0; --b) out.push_back({a, b, total - a - b});
        }
    }
    return out;
}

namespace {

/// Matrix of π ↦ Aπ on coefficient vectors of degree <= d (columns) into
/// degree <= d-1 (rows); derivatives in reference coordinates.
Eigen::MatrixXd operator_matrix(const DiffOperator& op, int d) {
    const auto cols = monomials(op.n, d);
    if (d == 0) return Eigen::MatrixXd::Zero(0, op.N * static_cast<int>(cols.size()));
    const auto rows = monomials(op.n, d - 1);
    std::map<std::array<int, 3>, int> row_index;
    for (std::size_t b = 0; b < rows.size(); ++b) row_index[rows[b]] = static_cast<int>(b);
    const int nb = static_cast<int>(rows.size());
    const int na = static_cast<int>(cols.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(op.M * nb, op.N * na);
    for (int a = 0; a < na; ++a)
        for (int j = 0; j < op.n; ++j) {
            const int power = cols[a][j];
            if (power == 0) continue;
            auto beta = cols[a];
            --beta[j];
            const int b = row_index.at(beta);
            for (int m = 0; m < op.M; ++m)
                for (int c = 0; c < op.N; ++c) T(m * nb + b, c * na + a) += op.coeff(j, m, c) * power;
        }
    return T;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& T) {
    const auto cols = T.cols();
    if (T.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

double legendre(int k, double t) {
    if (k == 0) return 1.0;
    double p0 = 1.0, p1 = t;
    for (int i = 2; i <= k; ++i) {
        const double p2 = ((2.0 * i - 1.0) * t * p1 - (i - 1.0) * p0) / i;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

void reference_values(const PolyKernelBasis& b, const double* y, std::vector<double>& mono, double* out) {
    const auto& ms = b.monomials;
    mono.resize(ms.size());
    for (std::size_t a = 0; a < ms.size(); ++a) {
        double v = 1.0;
        for (int k = 0; k < b.op.n; ++k)
            for (int e = 0; e < ms[a][k]; ++e) v *= y[k];
        mono[a] = v;
    }
    const int N = b.op.N;
    const std::size_t na = ms.size();
    for (std::size_t i = 0; i < b.elements.size(); ++i)
        for (int c = 0; c < N; ++c) {
            const double* coef = b.elements[i].data() + c * na;
            double s = 0.0;
            for (std::size_t a = 0; a < na; ++a) s += coef[a] * mono[a];
            out[i * N + c] = s;
        }
}

}  // namespace

std::vector<int> kernel_dimensions(const DiffOperator& op, int max_degree) {
    op.validate();
    std::vector<int> dims;
    for (int d = 0; d <= max_degree; ++d) dims.push_back(static_cast<int>(null_space(operator_matrix(op, d)).cols()));
    return dims;
}

double Cube::volume() const { return std::pow(side, n); }

bool Cube::contains(const double* x, double slack) const noexcept {
    for (int k = 0; k < n; ++k)
        if (x[k] < lo(k) - slack || x[k] > hi(k) + slack) return false;
    return true;
}

double PolyKernelBasis::scale() const { return std::pow(0.5 * cube.side, -0.5 * op.n); }

void PolyKernelBasis::evaluate_all(const double* x, double* out) const {
    std::array<double, 3> y{};
    const double inv = 2.0 / cube.side;
    for (int k = 0; k < op.n; ++k) y[k] = (x[k] - cube.center[k]) * inv;
    thread_local std::vector<double> mono;
    reference_values(*this, y.data(), mono, out);
    const double s = scale();
    const std::size_t total = elements.size() * op.N;
    for (std::size_t i = 0; i < total; ++i) out[i] *= s;
}

PolyKernelBasis PolyKernelBasis::on_cube(const Cube& q) const {
    if (q.n != op.n || !(q.side > 0.0)) throw DomainError("cube does not match the operator");
    PolyKernelBasis out = *this;
    out.cube = q;
    return out;
}

double PolyKernelBasis::operator_residual() const {
    const auto T = operator_matrix(op, degree);
    double worst = 0.0;
    for (const auto& e : elements) {
        const Eigen::Map<const Eigen::VectorXd> v(e.data(), static_cast<Eigen::Index>(e.size()));
        if (T.rows() > 0) worst = std::max(worst, (T * v).cwiseAbs().maxCoeff());
    }
    return worst;
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
    if (count < 1) throw DomainError("Gauss-Legendre needs at least one node");
    nodes.assign(count, 0.0);
    weights.assign(count, 0.0);
    for (int i = 0; i < (count + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = weights[count - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

PolyKernelBasis kernel_basis(const DiffOperator& op, const Cube& cube, int degree_cap) {
    op.validate();
    if (cube.n != op.n || !(cube.side > 0.0)) throw DomainError("cube does not match the operator");
    if (degree_cap < 1) throw DomainError("degree cap must be >= 1");

    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> spaces;
    int stable = -1;
    for (int d = 0; d <= degree_cap; ++d) {
        spaces.push_back(null_space(operator_matrix(op, d)));
        dims.push_back(static_cast<int>(spaces.back().cols()));
        if (d >= 1 && dims[d] == dims[d - 1]) {
            stable = d - 1;
            break;
        }
    }
    if (stable < 0) {
        std::ostringstream msg;
        msg << "kernel of " << op.name << " did not stabilize by degree " << degree_cap << "; dimensions";
        for (int d : dims) msg << ' ' << d;
        throw ConvergenceError(msg.str());
    }

    PolyKernelBasis b;
    b.op = op;
    b.cube = cube;
    b.degree = stable;
    b.dimensions = dims;
    b.monomials = monomials(op.n, stable);
    const auto& Z = spaces[stable];
    for (Eigen::Index i = 0; i < Z.cols(); ++i) b.elements.emplace_back(Z.col(i).data(), Z.col(i).data() + Z.rows());

    // Modified Gram-Schmidt in L^2([-1, 1]^n), two passes.
    std::vector<double> gx, gw;
    gauss_legendre(stable + 1, gx, gw);
    const int g = static_cast<int>(gx.size());
    const int N = op.N;
    std::vector<std::array<double, 3>> pts;
    std::vector<double> wts;
    for (int a = 0; a < g; ++a)
        for (int c = 0; c < (op.n >= 2 ? g : 1); ++c)
            for (int e = 0; e < (op.n >= 3 ? g : 1); ++e) {
                pts.push_back({gx[a], op.n >= 2 ? gx[c] : 0.0, op.n >= 3 ? gx[e] : 0.0});
                wts.push_back(gw[a] * (op.n >= 2 ? gw[c] : 1.0) * (op.n >= 3 ? gw[e] : 1.0));
            }
    auto inner = [&](const std::vector<double>& p, const std::vector<double>& q) {
        PolyKernelBasis one = b;
        one.elements = {p, q};
        std::vector<double> vals(2 * N), mono;
        double s = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            reference_values(one, pts[k].data(), mono, vals.data());
            for (int c = 0; c < N; ++c) s += wts[k] * vals[c] * vals[N + c];
        }
        return s;
    };
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < b.elements.size(); ++i) {
            auto& v = b.elements[i];
            for (std::size_t k = 0; k < i; ++k) {
                const double proj = inner(v, b.elements[k]);
                for (std::size_t t = 0; t < v.size(); ++t) v[t] -= proj * b.elements[k][t];
            }
            const double norm = std::sqrt(inner(v, v));
            for (double& t : v) t /= norm;
        }
    return b;
}

// ---------------------------------------------------------------- quadrature

std::vector<double> moment_corrected_weights(std::span<const double> nodes, double a, double b, int exact_degree) {
    const int K = static_cast<int>(nodes.size());
    if (K < exact_degree + 1)
        throw DomainError("need " + std::to_string(exact_degree + 1) + " nodes, have " + std::to_string(K));
    if (!(b > a)) throw DomainError("empty interval");
    Eigen::VectorXd w0 = Eigen::VectorXd::Zero(K);
    if (K == 1) {
        w0(0) = b - a;
    } else {
        for (int i = 0; i + 1 < K; ++i) {
            const double d = 0.5 * (nodes[i + 1] - nodes[i]);
            w0(i) += d;
            w0(i + 1) += d;
        }
        w0(0) += std::max(0.0, nodes[0] - a);
        w0(K - 1) += std::max(0.0, b - nodes[K - 1]);
    }
    const int D = exact_degree + 1;
    Eigen::MatrixXd V(D, K);
    for (int i = 0; i < K; ++i) {
        const double t = (2.0 * nodes[i] - a - b) / (b - a);
        for (int k = 0; k < D; ++k) V(k, i) = legendre(k, t);
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(D);
    mu(0) = b - a;
    const Eigen::VectorXd resid = mu - V * w0;
    const Eigen::MatrixXd G = V * V.transpose();
    const Eigen::VectorXd lambda = G.ldlt().solve(resid);
    const Eigen::VectorXd w = w0 + V.transpose() * lambda;
    return std::vector<double>(w.data(), w.data() + K);
}

std::size_t CubeQuadrature::count() const {
    std::size_t c = 1;
    for (int k = 0; k < n; ++k) c *= index[k].size();
    return c;
}

CubeQuadrature cube_quadrature(const BoundaryGrid& grid, std::span<const double> levels, const Cube& cube,
                               int degree) {
    const int n = grid.ambient_dim();
    if (cube.n != n) throw DomainError("cube dimension does not match the grid");
    CubeQuadrature q;
    q.n = n;
    const double slack = 1e-9 * grid.spacing();
    const int need = 2 * degree + 1;
    auto describe = [&]() {
        std::ostringstream s;
        s << "cube centered at (";
        for (int k = 0; k < n; ++k) s << (k ? "," : "") << cube.center[k];
        s << ") side " << cube.side;
        return s.str();
    };
    for (int k = 0; k < n; ++k) {
        const double lo = cube.lo(k), hi = cube.hi(k);
        if (k < n - 1) {
            for (int i = 0; i < grid.axis_count(); ++i) {
                const double x = grid.coordinate(i);
                if (x >= lo - slack && x <= hi + slack) {
                    q.index[k].push_back(i);
                    q.coord[k].push_back(x);
                }
            }
        } else {
            for (std::size_t i = 0; i < levels.size(); ++i)
                if (levels[i] >= lo - slack && levels[i] <= hi + slack) {
                    q.index[k].push_back(static_cast<int>(i));
                    q.coord[k].push_back(levels[i]);
                }
        }
        if (static_cast<int>(q.index[k].size()) < need)
            throw ResourceError("insufficient sampling in " + describe() + ": axis " + std::to_string(k) + " has " +
                                std::to_string(q.index[k].size()) + " nodes, need " + std::to_string(need));
        q.weight[k] = moment_corrected_weights(q.coord[k], lo, hi, 2 * degree);
    }
    return q;
}

std::vector<double> project_coefficients(const FieldComponents& u, const PolyKernelBasis& basis,
                                         const CubeQuadrature& quad) {
    const int N = basis.op.N;
    if (static_cast<int>(u.size()) != N) throw DomainError("field has the wrong number of components");
    const auto& grid = u.front().grid();
    const std::size_t l = basis.size();
    const int n = quad.n;

    std::vector<CompensatedSum> acc(l);
    std::vector<double> vals(l * N);
    std::array<double, 3> x{};
    const std::size_t c0 = quad.index[0].size();
    const std::size_t c1 = n >= 2 ? quad.index[1].size() : 1;
    const std::size_t c2 = n >= 3 ? quad.index[2].size() : 1;
    for (std::size_t a = 0; a < c0; ++a)
        for (std::size_t b = 0; b < c1; ++b)
            for (std::size_t c = 0; c < c2; ++c) {
                std::size_t node = 0, level = 0;
                double w = quad.weight[0][a];
                x[0] = quad.coord[0][a];
                if (n == 2) {
                    node = static_cast<std::size_t>(quad.index[0][a]);
                    level = static_cast<std::size_t>(quad.index[1][b]);
                    x[1] = quad.coord[1][b];
                    w *= quad.weight[1][b];
                } else {
                    node = grid.flat_index(quad.index[0][a], quad.index[1][b]);
                    level = static_cast<std::size_t>(quad.index[2][c]);
                    x[1] = quad.coord[1][b];
                    x[2] = quad.coord[2][c];
                    w *= quad.weight[1][b] * quad.weight[2][c];
                }
                basis.evaluate_all(x.data(), vals.data());
                for (std::size_t i = 0; i < l; ++i) {
                    double s = 0.0;
                    for (int comp = 0; comp < N; ++comp) s += u[comp].at(node, level) * vals[i * N + comp];
                    acc[i].add(w * s);
                }
            }
    std::vector<double> out(l);
    for (std::size_t i = 0; i < l; ++i) out[i] = acc[i].value();
    return out;
}

std::vector<double> project_coefficients(const FieldComponents& u, const PolyKernelBasis& basis) {
    if (u.empty()) throw DomainError("empty field");
    const auto quad = cube_quadrature(u.front().grid(), u.front().levels(), basis.cube, basis.degree);
    return project_coefficients(u, basis, quad);
}

void evaluate_projection(const PolyKernelBasis& basis, std::span<const double> coeffs, const double* x, double* out) {
    const int N = basis.op.N;
    thread_local std::vector<double> vals;
    vals.resize(basis.size() * N);
    basis.evaluate_all(x, vals.data());
    for (int c = 0; c < N; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i) s += coeffs[i] * vals[i * N + c];
        out[c] = s;
    }
}

FieldComponents sample_polynomial(const PolyKernelBasis& basis, std::span<const double> coeffs,
                                  const BoundaryGrid& grid, const std::vector<double>& levels) {
    const int N = basis.op.N;
    if (grid.ambient_dim() != basis.op.n) throw DomainError("grid dimension does not match the operator");
    FieldComponents out(N, HalfSpaceField(grid, levels));
    std::vector<double> val(N);
    std::array<double, 3> x{};
    for (std::size_t k = 0; k < levels.size(); ++k)
        for (std::size_t i = 0; i < grid.node_count(); ++i) {
            const auto p = grid.point(i);
            x[0] = p[0];
            x[1] = p[1];
            x[grid.dim()] = levels[k];
            evaluate_projection(basis, coeffs, x.data(), val.data());
            for (int c = 0; c < N; ++c) out[c].at(i, k) = val[c];
        }
    return out;
}

}  // namespace tracelab
