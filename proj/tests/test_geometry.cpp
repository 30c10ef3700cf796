#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcharm/geometry.hpp"

using namespace qcharm;

namespace {

std::vector<JordanCurve> catalog_curves()
{
    return {JordanCurve::circle(), JordanCurve::ellipse(2, 1), JordanCurve::ellipse(1.5, 1), JordanCurve::polar(0.1, 3),
            JordanCurve::square(), JordanCurve::kidney()};
}

} // namespace

TEST(ArcLength, UnitCircle)
{
    auto g = arclength_parametrize(JordanCurve::circle(), 256);
    EXPECT_NEAR(g.length(), two_pi, 1e-12);
    for (double s : {0.0, 0.3, 1.7, 4.0, 6.0}) {
        EXPECT_NEAR(std::abs(g.position(s) - std::polar(1.0, s)), 0.0, 1e-10) << s;
        EXPECT_NEAR(tangent_angle(g, s), s + pi / 2, 1e-9) << s;
    }
}

TEST(ArcLength, UnitSquareIsFlaggedNonC1)
{
    auto c = JordanCurve::square();
    auto g = arclength_parametrize(c, 256);
    EXPECT_NEAR(g.length(), 4.0, 1e-14);
    EXPECT_FALSE(c.is_c1());
    ASSERT_EQ(g.corners().size(), 4u);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(g.corners()[k], double(k), 1e-12);
    // piecewise constant with jumps of pi/2 between sides
    auto a = g.station_angles();
    double jumps = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
        double d = a[i] - a[i - 1];
        if (std::abs(d) > 1e-12) {
            EXPECT_NEAR(d, pi / 2, 1e-12);
            ++jumps;
        }
    }
    EXPECT_EQ(jumps, 3);  // the fourth closes the loop
}

TEST(ArcLength, EllipsePerimeterMatchesQuadratureOracle)
{
    auto g = arclength_parametrize(JordanCurve::ellipse(2, 1), 1024);
    EXPECT_NEAR(g.length(), oracle::ellipse_perimeter(2, 1), 1e-8);
    EXPECT_NEAR(oracle::ellipse_perimeter(2, 1), 9.688448220547675, 1e-12);  // frozen
}

TEST(ArcLength, PositionsAreArcLengthUniform)
{
    auto g = arclength_parametrize(JordanCurve::ellipse(2, 1), 1024);
    const int n = 400;
    double total = 0;
    for (int i = 0; i < n; ++i) {
        double s0 = g.length() * i / n, s1 = g.length() * (i + 1) / n;
        double piece = 0;
        for (int k = 0; k < 50; ++k)
            piece += std::abs(g.position(s0 + (s1 - s0) * (k + 1) / 50) - g.position(s0 + (s1 - s0) * k / 50));
        EXPECT_NEAR(piece, s1 - s0, 1e-7);
        total += piece;
    }
    EXPECT_NEAR(total, g.length(), 1e-6);
}

TEST(ArcLength, RejectsTooFewStations)
{
    EXPECT_THROW(arclength_parametrize(JordanCurve::circle(), 8), PreconditionError);
}

TEST(Curves, FlatSegmentIsRejected)
{
    EXPECT_THROW(JordanCurve::from_points({{0, 0}, {1, 0}, {2, 0}}), DegenerateError);
}

TEST(Curves, SelfIntersectingPolylineIsRejected)
{
    EXPECT_THROW(JordanCurve::from_points({{0, 0}, {2, 2}, {2, 0}, {0, 1}}), GeometryError);
}

TEST(Curves, NegativeOrientationIsReversedWithWarning)
{
    auto c = JordanCurve::from_points({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    EXPECT_GT(c.signed_area(), 0);
    EXPECT_FALSE(c.warnings().empty());
}

TEST(Curves, NamedUnknownListsValidNames)
{
    try {
        JordanCurve::named("hexagon", {});
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("circle"), std::string::npos);
    }
}

TEST(ChordArc, CircleAntipodal)
{
    auto r = chord_arc_constant(JordanCurve::circle(), 20000);
    EXPECT_NEAR(r.constant, pi / 2, 1e-3);
    EXPECT_NEAR(std::abs(r.p1 - r.p2), 2.0, 1e-3);
    // dense oracle agrees
    double dense = oracle::chord_arc_dense([](double s) { return std::polar(1.0, s); }, two_pi, 600);
    EXPECT_NEAR(dense, pi / 2, 1e-3);
}

TEST(ChordArc, SquareOppositeMidpoints)
{
    auto r = chord_arc_constant(JordanCurve::square(), 20000);
    double dense = oracle::chord_arc_dense(oracle::unit_square, 4.0, 800);
    EXPECT_NEAR(dense, 2.0, 1e-2);
    EXPECT_NEAR(r.constant, 2.0, 1e-2);
}

TEST(ChordArc, EllipseAgreesWithDenseOracle)
{
    auto c = JordanCurve::ellipse(2, 1);
    auto g = arclength_parametrize(c, 2048);
    double dense = oracle::chord_arc_dense([&](double s) { return g.position(s); }, g.length(), 600);
    auto r = chord_arc_constant(c, 20000);
    EXPECT_GE(r.constant, dense - 1e-9);
    EXPECT_NEAR(r.constant, dense, 1e-3 * dense);
}

TEST(ChordArc, InvariantUnderSimilarities)
{
    for (const auto& c : catalog_curves()) {
        double base = chord_arc_constant(c, 5000).constant;
        EXPECT_GE(base, 1.0);
        for (auto [alpha, beta] : std::vector<std::pair<cplx, cplx>>{{2.0, {0.5, -1}}, {std::polar(1.0, 0.7), 3.0}, {std::polar(0.25, -2.0), {0, 1}}}) {
            double moved = chord_arc_constant(c.transformed(alpha, beta), 5000).constant;
            EXPECT_NEAR(moved, base, 1e-12 * base) << c.name();
        }
    }
}

TEST(ChordArc, BudgetPrecondition)
{
    EXPECT_THROW(chord_arc_constant(JordanCurve::circle(), 10), PreconditionError);
}

TEST(Tangent, CircleLiftIsNotWrapped)
{
    auto g = arclength_parametrize(JordanCurve::circle(), 256);
    EXPECT_NEAR(tangent_angle(g, 0), pi / 2, 1e-12);
    EXPECT_NEAR(tangent_angle(g, g.length()), pi / 2 + two_pi, 1e-9);
}

TEST(Tangent, EllipseAtVertexMatchesImplicitOracle)
{
    auto g = arclength_parametrize(JordanCurve::ellipse(2, 1), 1024);
    EXPECT_NEAR(std::abs(g.position(0) - cplx(2, 0)), 0, 1e-12);
    EXPECT_NEAR(tangent_angle(g, 0), pi / 2, 1e-6);
    for (double s : {0.4, 1.3, 2.9, 5.5, 8.0}) {
        cplx p = g.position(s);
        double want = oracle::ellipse_tangent(2, 1, p);
        EXPECT_NEAR(std::abs(detail::wrap_angle(tangent_angle(g, s) - want)), 0, 1e-6) << s;
    }
}

TEST(Tangent, CornerRaisesErrorWithLocation)
{
    auto g = arclength_parametrize(JordanCurve::square(), 256);
    try {
        tangent_angle(g, 1.02);
        FAIL();
    } catch (const GeometryError& e) {
        EXPECT_NEAR(e.location(), 1.0, 1e-12);
    }
}

TEST(Convexity, CatalogCurves)
{
    EXPECT_TRUE(is_convex(JordanCurve::circle()));
    EXPECT_TRUE(is_convex(JordanCurve::square()));
    EXPECT_TRUE(is_convex(JordanCurve::ellipse(2, 1)));
    EXPECT_TRUE(is_convex(JordanCurve::polar(0.1, 3)));
    EXPECT_FALSE(is_convex(JordanCurve::kidney()));
}

TEST(Convexity, CrossProductScanOracle)
{
    // independent sign scan on the kidney samples
    auto c = JordanCurve::kidney();
    auto p = c.samples();
    int negative = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cplx a = p[i], b = p[(i + 1) % p.size()], d = p[(i + 2) % p.size()];
        double cr = (b - a).real() * (d - b).imag() - (b - a).imag() * (d - b).real();
        if (cr < -1e-12) ++negative;
    }
    EXPECT_GT(negative, 0);
}

TEST(Invariants, LengthStableUnderDoubling)
{
    for (const auto& c : catalog_curves()) {
        double l1 = ArcLengthParam(c, 1024).length(), l2 = ArcLengthParam(c, 2048).length();
        EXPECT_LT(std::abs(l1 - l2), 1e-6 * l2) << c.name();
    }
}

TEST(Invariants, LiftHasNoTearsOnSmoothCurves)
{
    for (const auto& c : catalog_curves()) {
        if (!c.is_c1()) continue;
        ArcLengthParam g(c, 512);
        auto a = g.station_angles();
        for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - a[i - 1]), pi / 2) << c.name();
        EXPECT_NEAR(a.back() + (a[1] - a[0]) - a.front(), two_pi, 0.1) << c.name();
    }
}

TEST(Locate, RoundTrip)
{
    for (const auto& c : catalog_curves()) {
        ArcLengthParam g(c, 2048);
        for (double u : {0.05, 0.33, 0.5, 0.71, 0.98}) {
            double s = u * g.length();
            EXPECT_NEAR(g.locate(g.position(s)), s, 1e-8) << c.name();
        }
    }
}
