#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "specgraph/symplectic.hpp"

using namespace specgraph;

TEST_CASE("symplectic forms are skew and orthogonal") {
    for (int k : {1, 3}) {
        for (auto space : {SymplecticSpace::standard(k), SymplecticSpace::doubled(k)}) {
            CHECK((space.form + space.form.transpose()).norm() == 0.0);
            CHECK((space.form * space.form + Mat::Identity(space.dim, space.dim))
                      .norm() == 0.0);
        }
    }
}

TEST_CASE("vertex plane for one edge, alpha = 0: Neumann at 0, Dirichlet at l") {
    StarGraph g{1, {1.0}, 0.0};
    LagrangianFrame f = vertex_lagrangian(g);
    CHECK(f.frame.rows() == 4);
    CHECK(f.frame.cols() == 2);
    CHECK(f.isotropy_residual() < 1e-14);
    // the plane must contain (1,0,0,0) and (0,0,0,1)
    Eigen::VectorXd e0(4), e3(4);
    e0 << 1, 0, 0, 0;
    e3 << 0, 0, 0, 1;
    Mat p = f.projector();
    CHECK((p * e0 - e0).norm() < 1e-13);
    CHECK((p * e3 - e3).norm() < 1e-13);
}

TEST_CASE("vertex plane m = 3 is orthonormal and isotropic") {
    StarGraph g{3, {0.4, 0.5, 0.6}, 0.0};
    LagrangianFrame f = vertex_lagrangian(g);
    CHECK(f.frame.cols() == 6);
    CHECK((f.frame.transpose() * f.frame - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() <
          1e-13);
    CHECK(f.isotropy_residual() < 1e-14);

    StarGraph ga{3, {0.4, 0.5, 0.6}, 2.5};
    LagrangianFrame fa = vertex_lagrangian(ga);
    CHECK(fa.isotropy_residual() < 1e-14);
}

TEST_CASE("vertex plane meets the pure Dirichlet plane in dimension 2m-1") {
    // values forced to zero leave the flux constraint on m derivative slots:
    // dim = 2m - 1 (m = 1 gives the spec's value 1; the m = 3 rank
    // computation gives 5)
    for (double alpha : {0.0, 2.5, -1.0}) {
        for (int m : {1, 2, 3}) {
            std::vector<double> lens(m, 0.7);
            StarGraph g{m, lens, alpha};
            LagrangianFrame f = vertex_lagrangian(g);
            LagrangianFrame d = dirichlet_plane(m);
            CHECK(intersection_dim(f, d) == 2 * m - 1);
        }
    }
}

TEST_CASE("intersection_dim basics") {
    StarGraph g{3, {0.4, 0.5, 0.6}, 0.7};
    LagrangianFrame f = vertex_lagrangian(g);
    CHECK(intersection_dim(f, f) == 6);  // dim/2

    // Dirichlet vs Neumann on one edge: complementary Lagrangians
    Mat dir(4, 2), neu(4, 2);
    dir << 0, 0, 0, 0, 1, 0, 0, 1;
    neu << 1, 0, 0, 1, 0, 0, 0, 0;
    auto space = SymplecticSpace::standard(2);
    CHECK(intersection_dim(LagrangianFrame{space, dir}, LagrangianFrame{space, neu}) ==
          0);
    CHECK_THROWS(intersection_dim(LagrangianFrame{space, dir},
                                  LagrangianFrame{space, neu}, -1.0));
}

TEST_CASE("intersection_dim is symmetric and orthogonally invariant") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    StarGraph g{2, {0.3, 0.9}, 1.3};
    LagrangianFrame a = vertex_lagrangian(g);
    LagrangianFrame d = dirichlet_plane(2);
    CHECK(intersection_dim(a, d) == intersection_dim(d, a));

    // right-multiply by a random orthogonal matrix
    Mat r(4, 4);
    for (int i = 0; i < 16; ++i) r(i / 4, i % 4) = n(rng);
    Eigen::HouseholderQR<Mat> qr(r);
    Mat q = qr.householderQ();
    LagrangianFrame a2{a.space, a.frame * q};
    CHECK(intersection_dim(a2, d) == intersection_dim(a, d));
}

TEST_CASE("rotating plane endpoints") {
    // t = 0: Dirichlet-Dirichlet
    LagrangianFrame f0 = rotating_plane(0.0, M_PI);
    Mat dir(4, 2);
    dir << 0, 0, 0, 0, 1, 0, 0, 1;
    CHECK(intersection_dim(f0, LagrangianFrame{f0.space, dir}) == 2);

    // t = 1: Dirichlet at 0, Neumann at l: contains (0,0,1,0) and (0,1,0,0)
    LagrangianFrame f1 = rotating_plane(1.0, M_PI);
    Eigen::VectorXd v(4);
    v << 0, 1, 0, 0;
    CHECK((f1.projector() * v - v).norm() < 1e-13);

    // generic t: isotropy
    CHECK(rotating_plane(0.5, 1.0).isotropy_residual() < 1e-14);
    CHECK(rotating_plane_both_ends(0.37, 1.0).isotropy_residual() < 1e-14);

    // t = 2: Dirichlet-Dirichlet again
    LagrangianFrame f2 = rotating_plane(2.0, M_PI);
    CHECK(intersection_dim(f2, LagrangianFrame{f0.space, dir}) == 2);
}

TEST_CASE("rotating frame derivative is consistent with finite differences") {
    const double t = 0.73, h = 1e-6;
    for (bool both : {false, true}) {
        Mat fd = ((both ? rotating_plane_both_ends(t + h, 1.0)
                        : rotating_plane(t + h, 1.0))
                      .frame -
                  (both ? rotating_plane_both_ends(t - h, 1.0)
                        : rotating_plane(t - h, 1.0))
                      .frame) /
                 (2 * h);
        CHECK((fd - rotating_plane_frame_derivative(t, both)).cwiseAbs().maxCoeff() <
              1e-9);
    }
}

TEST_CASE("frames produced by constructors satisfy the isotropy bound") {
    for (double alpha : {0.0, 1.0, -0.5}) {
        StarGraph g{4, {0.2, 0.3, 0.4, 0.5}, alpha};
        CHECK(vertex_lagrangian(g).isotropy_residual() < 1e-12);
    }
    for (double t : {0.1, 0.9, 1.7}) {
        CHECK(rotating_plane(t, 2.0).isotropy_residual() < 1e-12);
        CHECK(rotating_plane_both_ends(t, 2.0).isotropy_residual() < 1e-12);
    }
}
