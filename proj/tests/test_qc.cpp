#include <gtest/gtest.h>

#include "qcharm/catalog.hpp"
#include "qcharm/qc.hpp"

using namespace qcharm;

namespace {

const std::vector<double> grid_radii{0.0, 0.5, 0.9, 0.99, 0.999};

std::vector<MapSpec> catalog()
{
    return {MapSpec::identity(),
            MapSpec::mobius(cplx(0.3, 0.1), 0.2),
            MapSpec::shear(0.3),
            MapSpec::rkc(JordanCurve::circle(), Reparam::sine(0.2, 2)),
            MapSpec::rkc(JordanCurve::ellipse(1.5, 1), Reparam::sine(0.2, 1)),
            MapSpec::rkc(JordanCurve::polar(0.1, 3), Reparam::sine(0.15, 2)),
            MapSpec::sc_square()};
}

} // namespace

TEST(MeasureQc, IdentityAndShear)
{
    auto id = measure_qc(build_map(MapSpec::identity(), 64), grid_radii, 64);
    EXPECT_EQ(id.k_sup, 0.0);
    EXPECT_EQ(id.K, 1.0);
    auto sh = measure_qc(build_map(MapSpec::shear(0.3), 64), grid_radii, 64);
    EXPECT_NEAR(sh.k_sup, 0.3, 1e-15);
    EXPECT_NEAR(sh.K, 13.0 / 7.0, 1e-12);
    EXPECT_NEAR(sh.jacobian_min, 0.91, 1e-14);
}

TEST(MeasureQc, RkcStableUnderGridDoubling)
{
    auto m = build_map(MapSpec::rkc(JordanCurve::circle(), Reparam::sine(0.2, 1)), 2048);
    auto coarse = measure_qc(m, grid_radii, 128);
    auto fine = measure_qc(m, {0.0, 0.25, 0.5, 0.7, 0.9, 0.95, 0.99, 0.995, 0.999}, 256);
    EXPECT_LT(coarse.k_sup, 1);
    EXPECT_NEAR(coarse.k_sup, fine.k_sup, 1e-3);
}

TEST(MeasureQc, DistortionIdentityOnEveryGrid)
{
    for (const auto& s : catalog()) {
        auto q = measure_qc(build_map(s, 2048), grid_radii, 128);
        EXPECT_TRUE(q.distortion_holds) << s.label;
        EXPECT_LE(q.distortion_defect, 1e-10) << s.label;
    }
}

TEST(MeasureQc, ConformalMapsHaveZeroDilatation)
{
    for (const auto& s : {MapSpec::mobius(cplx(0.3, 0.1), 0.2), MapSpec::mobius(-0.6), MapSpec::sc_square()}) {
        auto q = measure_qc(build_map(s, 2048), grid_radii, 128);
        EXPECT_LE(q.k_sup, 1e-10) << s.label;
    }
}

TEST(MeasureQc, InvariantUnderSimilaritiesOfTheTarget)
{
    for (const auto& s : catalog()) {
        auto m = build_map(s, 1024);
        double K = measure_qc(m, grid_radii, 64).K;
        for (auto [a, b] : std::vector<std::pair<cplx, cplx>>{{3.0, {1, 2}}, {std::polar(0.5, 1.1), -4.0}}) {
            double moved = measure_qc(m.affine(a, b), grid_radii, 64).K;
            EXPECT_NEAR(moved, K, 1e-9) << s.label;
        }
    }
}

TEST(MeasureQc, ErrorsCarryLocation)
{
    std::vector<cplx> c(129, cplx{});
    c[64 + 2] = 1;  // f = z^2: f_z vanishes at 0
    try {
        measure_qc(HarmonicMap(c), {0.0, 0.5}, 64);
        FAIL();
    } catch (const NotQuasiconformalError& e) {
        EXPECT_EQ(e.where(), cplx(0));
    }
    std::vector<cplx> anti(129, cplx{});
    anti[64 - 1] = 1;  // conj(z) reverses orientation
    EXPECT_THROW(measure_qc(HarmonicMap(anti), {0.5}, 64), NotQuasiconformalError);
}

TEST(MeasureQc, Preconditions)
{
    auto m = build_map(MapSpec::identity(), 64);
    EXPECT_THROW(measure_qc(m, {0.9995}, 64), PreconditionError);
    EXPECT_THROW(measure_qc(m, {0.5}, 32), PreconditionError);
    EXPECT_THROW(measure_qc(m, {}, 64), PreconditionError);
}

TEST(Heinz, BoundValue)
{
    EXPECT_NEAR(heinz_bound, 27.0 / (4 * pi * pi), 1e-16);
    EXPECT_NEAR(heinz_bound, 0.68391798958578, 1e-13);
}

TEST(Heinz, IdentityAndSelfMaps)
{
    auto id = heinz_check(build_map(MapSpec::identity(), 64));
    EXPECT_EQ(id.lhs, 1.0);
    EXPECT_TRUE(id.pass);
    for (double eps : {0.1, 0.2, 0.3}) {
        auto h = heinz_check(build_map(MapSpec::rkc(JordanCurve::circle(), Reparam::sine(eps, 2)), 2048));
        EXPECT_TRUE(h.pass) << eps;
        EXPECT_GE(h.lhs, 0.68385);
    }
}

TEST(Heinz, PreconditionFailures)
{
    EXPECT_THROW(heinz_check(build_map(MapSpec::shear(0.3), 64)), PreconditionError);
    // t + 0.2 sin t moves the origin: c_0 = -J_1(0.2) != 0
    auto moved = build_map(MapSpec::rkc(JordanCurve::circle(), Reparam::sine(0.2, 1)), 1024);
    EXPECT_NEAR(moved.coeff(0).real(), -0.099500832639236, 1e-12);
    EXPECT_THROW(heinz_check(moved), PreconditionError);
}

TEST(Dz0, IdentityOnCircle)
{
    // distance goes to an inscribed 8N-gon, so the sagitta (pi / 8N)^2 / 2 bounds the error
    auto d = dz0_lower_bound(build_map(MapSpec::identity(), 2048), JordanCurve::circle(), 1.0);
    EXPECT_EQ(d.lhs, 1.0);
    EXPECT_NEAR(d.rhs, 3 * std::sqrt(3.0) / two_pi, 5e-8);
    EXPECT_NEAR(d.rhs, 0.827, 1e-3);
    EXPECT_TRUE(d.pass);
}

TEST(Dz0, Homogeneity)
{
    auto d1 = dz0_lower_bound(build_map(MapSpec::identity(), 64), JordanCurve::circle(), 1.0);
    auto d2 = dz0_lower_bound(build_map(MapSpec::identity(), 64).affine(2.0, 0.0), JordanCurve::circle(2.0), 1.0);
    EXPECT_NEAR(d2.lhs, 2 * d1.lhs, 1e-14);
    EXPECT_NEAR(d2.rhs, 2 * d1.rhs, 1e-12);
    EXPECT_TRUE(d2.pass);
}

TEST(Dz0, ShearOntoEllipse)
{
    auto s = MapSpec::shear(0.3);
    auto d = dz0_lower_bound(build_map(s, 2048), target_curve(s), 13.0 / 7.0);
    EXPECT_EQ(d.lhs, 1.0);
    EXPECT_NEAR(d.dist, 0.7, 1e-7);  // inradius: the minor semi-axis
    EXPECT_NEAR(d.rhs, dz0_factor(13.0 / 7.0) * 0.7, 1e-7);
    EXPECT_TRUE(d.pass);
}

TEST(Ck, Values)
{
    EXPECT_NEAR(ck_constant(1.0), two_pi / (3 * std::sqrt(3.0)), 1e-15);
    EXPECT_NEAR(ck_constant(1.0), 1.2092, 1e-4);
    double prev = ck_constant(1.0);
    for (double K : {1.5, 2.0, 5.0, 100.0}) {
        double c = ck_constant(K);
        EXPECT_GT(c, prev);
        EXPECT_GT(c, two_pi / (3 * std::sqrt(6.0)));
        EXPECT_TRUE(std::isfinite(c));
        prev = c;
    }
    EXPECT_THROW(ck_constant(0.9), DomainError);
}

TEST(Diameter, StraightImages)
{
    auto id = build_map(MapSpec::identity(), 64);
    for (double t : {0.0, 0.7, 2.0}) EXPECT_NEAR(diameter_image_chordarc(id, t, 128), 1.0, 1e-12);
    EXPECT_NEAR(diameter_image_chordarc(build_map(MapSpec::shear(0.3), 64), 0.0, 128), 1.0, 1e-12);
}

TEST(Diameter, RkcStableUnderSampleDoubling)
{
    auto m = build_map(MapSpec::rkc(JordanCurve::circle(), Reparam::sine(0.2, 1)), 2048);
    double a = diameter_image_chordarc(m, pi / 4, 256), b = diameter_image_chordarc(m, pi / 4, 512);
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_GE(a, 1.0);
    EXPECT_NEAR(a, b, 0.05 * b);
}

TEST(Diameter, Precondition)
{
    EXPECT_THROW(diameter_image_chordarc(build_map(MapSpec::identity(), 64), 0, 8), PreconditionError);
}
