#include "idgeo/metric.hpp"

namespace idgeo {

double min_singular_value(const Eigen::MatrixXd& jacobian) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
    const auto& s = svd.singularValues();
    return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

MetricTensor pullback_metric(const Decoder& f, const Eigen::VectorXd& z, const PullbackOptions& options) {
    const Eigen::MatrixXd J = f.jacobian(z);
    if (options.verify) {
        const double smin = min_singular_value(J);
        if (!(smin > options.rank_tol)) {
            throw RankDeficiencyError("pullback_metric: Jacobian lost full column rank (smallest singular value " +
                                      std::to_string(smin) + ")");
        }
    }
    Eigen::MatrixXd G = J.transpose() * J;
    // JᵀJ is symmetric in exact arithmetic; enforce it bitwise.
    G = 0.5 * (G + G.transpose()).eval();
    return MetricTensor(std::move(G));
}

namespace {

struct FirstForm {
    double E, F, G;
};

FirstForm first_form(const Decoder& f, double u, double v) {
    const Eigen::MatrixXd J = f.jacobian(Eigen::Vector2d(u, v));
    return {J.col(0).squaredNorm(), J.col(0).dot(J.col(1)), J.col(1).squaredNorm()};
}

} // namespace

double gaussian_curvature_2d(const Decoder& f, const Eigen::VectorXd& z, double fd_step) {
    if (f.latent_dim() != 2 || z.size() != 2) {
        throw UnsupportedError("gaussian_curvature_2d: only defined for a 2-dimensional latent space");
    }
    if (!(fd_step > 0.0)) {
        throw ArgumentError("gaussian_curvature_2d: fd_step must be positive");
    }
    const double u = z(0), v = z(1), h = fd_step;

    const FirstForm c = first_form(f, u, v);
    const FirstForm up = first_form(f, u + h, v), um = first_form(f, u - h, v);
    const FirstForm vp = first_form(f, u, v + h), vm = first_form(f, u, v - h);
    const FirstForm pp = first_form(f, u + h, v + h), pm = first_form(f, u + h, v - h);
    const FirstForm mp = first_form(f, u - h, v + h), mm = first_form(f, u - h, v - h);

    const double E_u = (up.E - um.E) / (2 * h), E_v = (vp.E - vm.E) / (2 * h);
    const double F_u = (up.F - um.F) / (2 * h), F_v = (vp.F - vm.F) / (2 * h);
    const double G_u = (up.G - um.G) / (2 * h), G_v = (vp.G - vm.G) / (2 * h);
    const double E_vv = (vp.E - 2 * c.E + vm.E) / (h * h);
    const double G_uu = (up.G - 2 * c.G + um.G) / (h * h);
    const double F_uv = (pp.F - pm.F - mp.F + mm.F) / (4 * h * h);

    Eigen::Matrix3d m1;
    m1 << -0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v,
          F_v - 0.5 * G_u,                 c.E,       c.F,
          0.5 * G_v,                       c.F,       c.G;
    Eigen::Matrix3d m2;
    m2 << 0.0,       0.5 * E_v, 0.5 * G_u,
          0.5 * E_v, c.E,       c.F,
          0.5 * G_u, c.F,       c.G;

    const double det_g = c.E * c.G - c.F * c.F;
    if (!(det_g > 0.0)) {
        throw RankDeficiencyError("gaussian_curvature_2d: degenerate metric");
    }
    return (m1.determinant() - m2.determinant()) / (det_g * det_g);
}

} // namespace idgeo
