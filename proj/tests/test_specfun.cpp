#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "minnaert/specfun.hpp"

using namespace minnaert;
using namespace minnaert::specfun;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

void expect_close(cplx got, cplx want, double tol) {
    EXPECT_LE(std::abs(got - want), tol * std::max(1.0, std::abs(want))) << "got " << got << " want " << want;
}

// Test-side power series J_n(z) = sum (-1)^m (z/2)^(2m+n)/(m!(m+n)!), long double accumulation.
std::complex<long double> ref_series_j(int n, std::complex<long double> z) {
    std::complex<long double> term = n == 0 ? 1.0L : z / 2.0L, sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= -(z * z) / (4.0L * m * (m + n));
        sum += term;
    }
    return sum;
}

} // namespace

TEST(BesselJ, ValuesAtOrigin) {
    expect_close(bessel_J(0, 0, 0.0), 1.0, 0.0);
    expect_close(bessel_J(1, 0, 0.0), 0.0, 0.0);
    expect_close(bessel_J(1, 1, 0.0), 0.5, 1e-15);
}

TEST(BesselJ, SmallRealArgument) {
    EXPECT_NEAR(bessel_J(0, 0, 0.1).real(), 0.9975015621, 1e-10);
    EXPECT_NEAR(bessel_J(0, 0, 0.1).real(), 1.0 - 0.0025 + 0.0000015625, 1e-9);
}

TEST(BesselJ, MatchesLongDoubleSeries) {
    for (cplx z : {cplx(0.5, 0.0), cplx(2.0, 1.0), cplx(-3.0, 0.7), cplx(0.0, 4.0), cplx(8.0, -1.0)}) {
        for (int n : {0, 1}) {
            const auto ref = ref_series_j(n, std::complex<long double>(z.real(), z.imag()));
            expect_close(bessel_J(n, 0, z), cplx(double(ref.real()), double(ref.imag())), 1e-12);
        }
    }
}

TEST(BesselJ, FrozenComplexValues) {
    expect_close(bessel_J(0, 0, {2.0, 1.0}), {0.18785372808246172, -0.64616943515398072}, 1e-13);
    expect_close(bessel_J(1, 0, {0.3, -0.2}), {0.15054697730054616, -0.097128212582615552}, 1e-13);
    expect_close(bessel_J(1, 0, 20.0), 0.066833124175850046, 1e-12);
}

TEST(BesselJ, DerivativeIdentities) {
    for (cplx z : {cplx(0.3, 0.1), cplx(1.7, -0.4), cplx(6.0, 0.0)}) {
        expect_close(bessel_J(0, 1, z), -bessel_J(1, 0, z), 1e-14);
        const double h = 1e-6;
        const cplx fd = (bessel_J(1, 0, z + h) - bessel_J(1, 0, z - h)) / (2.0 * h);
        expect_close(bessel_J(1, 1, z), fd, 1e-8);
    }
}

TEST(BesselJ, RejectsBadInput) {
    EXPECT_THROW(bessel_J(2, 0, 1.0), UnsupportedOrderError);
    EXPECT_THROW(bessel_J(0, 2, 1.0), UnsupportedOrderError);
    EXPECT_THROW(bessel_J(0, 0, cplx(NAN, 0.0)), DomainError);
    EXPECT_THROW(bessel_J(0, 0, cplx(0.0, INFINITY)), DomainError);
}

TEST(Hankel1, FrozenValues) {
    expect_close(hankel1_H(0, 0, 1.0), {0.7651976866, 0.0882569642}, 1e-10);
    expect_close(hankel1_H(0, 0, {0.3, 0.1}), {0.75791185451925781, -0.78975863024109036}, 1e-13);
    expect_close(hankel1_H(1, 0, {5.0, -2.0}), {-2.4186328734900716, 0.58957260942886381}, 1e-12);
    expect_close(hankel1_H(0, 0, {15.0, 0.5}), {-0.0065500323146987263, 0.12467777377426964}, 1e-12);
    expect_close(hankel1_H(1, 0, {0.01, -0.001}), {6.3068229800816178, -63.048795552276426}, 1e-13);
}

TEST(Hankel1, DerivativeOfOrderZero) {
    const cplx z(0.3, 0.1);
    expect_close(hankel1_H(0, 1, z), -hankel1_H(1, 0, z), 1e-15);
    const double h = 1e-6;
    const cplx fd = (hankel1_H(1, 0, z + h) - hankel1_H(1, 0, z - h)) / (2.0 * h);
    expect_close(hankel1_H(1, 1, z), fd, 1e-7);
}

TEST(Hankel1, LeadingSmallArgumentTerm) {
    const cplx z = 1e-4 * std::exp(I * 0.3);
    const cplx lead = -2.0 * I / (pi * z);
    EXPECT_LT(std::abs(hankel1_H(1, 0, z) - lead) / std::abs(lead), 1e-7);
}

TEST(Hankel1, SingularAtZero) {
    EXPECT_THROW(hankel1_H(0, 0, 0.0), SingularityError);
    EXPECT_THROW(hankel1_H(1, 1, 0.0), SingularityError);
    EXPECT_THROW(hankel1_H(3, 0, 1.0), UnsupportedOrderError);
}

TEST(Hankel1, WronskianOnRealAxis) {
    for (double x = 0.05; x <= 10.0; x += 0.35) {
        const double w = bessel_J(0, 0, x).real() * hankel1_H(0, 1, x).imag() -
                         bessel_J(0, 1, x).real() * hankel1_H(0, 0, x).imag();
        EXPECT_NEAR(w, 2.0 / (pi * x), 1e-10 * std::max(1.0, 2.0 / (pi * x))) << "x = " << x;
    }
}

TEST(Hankel1, ContinuousAcrossSeriesAsymptoticSwitch) {
    // switch radius 14 on and below the real axis, 12 - 3 sin(arg) above it
    for (double arg : {0.0, 0.4, 1.2, -0.3}) {
        const double r = arg > 0.0 ? 12.0 - 3.0 * std::sin(arg) : 14.0;
        const cplx d = std::exp(I * arg);
        for (int n : {0, 1}) {
            const cplx a = hankel1_H(n, 0, (r - 1e-3) * d), b = hankel1_H(n, 0, (r + 1e-3) * d);
            const cplx fd = hankel1_H(n, 1, r * d) * 2e-3 * d;
            EXPECT_LT(std::abs(b - a - fd), 1e-8 * std::abs(hankel1_H(n, 0, r * d))) << "arg = " << arg << " n = " << n;
        }
    }
}

struct CylinderReference {
    double x, y;
    int n;
    cplx J, H;
};

// Independent 40-digit evaluations (mpmath besselj / hankel1), rounded to double.
const CylinderReference cylinder_refs[] = {
    {0.3, 0.1, 0, {0.9800439022066221, -0.014850405885365545}, {0.7579118545192578, -0.7897586302410904}},
    {0.3, 0.1, 1, {0.14887469828650735, 0.04838321584723999}, {-0.4645757444926201, -2.0383406456802886}},
    {2.5, -1.0, 0, {-0.18195629418219705, 0.5522817215445005}, {-0.37851218274004084, 1.2791213602203864}},
    {2.5, -1.0, 1, {0.6668911868805573, 0.28767279255587125}, {1.1435091163276676, 0.5875924096415909}},
    {7.0, 0.5, 0, {0.33841521970252975, 0.0015232245143553627}, {0.1808857571081687, -0.022115729304889253}},
    {7.0, 0.5, 1, {0.0003015261983977254, 0.1563357014498597}, {-0.009547673770360064, -0.18378976015256282}},
    {12.893932855046389, 5.451467373978799, 0, {24.05649550857534, 6.561146305059346}, {0.0007168027666956639, -0.00056303536414942}},
    {12.893932855046389, 5.451467373978799, 1, {-5.671763530753816, 23.951582741186723}, {-0.0005478487238431242, -0.0007453193688265018}},
    {12.895774977034394, 5.452246210663415, 0, {24.08557174283546, 6.5214011313882665}, {0.0007172296523390613, -0.0005612360837052875}},
    {12.895774977034394, 5.452246210663415, 1, {-5.631708939720321, 23.97895637475303}, {-0.000546011947181358, -0.0007456899518140329}},
    {13.373755511269358, -4.136987373052093, 0, {6.604669455334575, 1.0881417000323623}, {13.205974421896165, 2.175821783456816}},
    {13.373755511269358, -4.136987373052093, 1, {1.304325621138516, -6.49780101409448}, {2.609004446843029, -12.999019250496517}},
    {20.0, 3.0, 0, {1.6225953170176561, -0.747529945525452}, {0.008469201088603745, 0.002477039870290517}},
    {20.0, 3.0, 1, {0.7872826502073456, 1.5903221371824245}, {0.002693032008035917, -0.00844236422531016}},
    {0.007648421872844885, 0.00644217687237691, 0, {0.9999957506742054, -2.4636190907434757e-05}, {0.5542740745686348, -3.005544871298171}},
    {0.007648421872844885, 0.00644217687237691, 1, {0.003824242489060111, 0.0032210344855116905}, {-40.99934547892258, -48.70229153271435}},
};

TEST(CylinderFunctions, MatchHighPrecisionReference) {
    for (const CylinderReference& r : cylinder_refs) {
        const cplx z(r.x, r.y);
        expect_close(bessel_J(r.n, 0, z), r.J, 1e-12);
        EXPECT_LE(std::abs(hankel1_H(r.n, 0, z) - r.H), 1e-12 * std::abs(r.H)) << "z = " << z << " n = " << r.n;
    }
}

TEST(Hankel1, UpperHalfPlaneNearSwitchRelativeAccuracy) {
    // Reference values from mpmath; H^(1) is exponentially small here.
    const CylinderReference refs[] = {
        {0.0008669411527290043, 8.99999995824517, 0, {}, {2.9602903629666184e-08, -3.239203769938398e-05}},
        {0.0008669411527290043, 8.99999995824517, 1, {}, {-3.414637216755481e-05, -3.137120978420762e-08}},
        {3.9859352992434096, 10.25242994563949, 0, {}, {-7.182796975558208e-06, 4.353194659723498e-06}},
        {3.9859352992434096, 10.25242994563949, 1, {}, {4.42065890124747e-06, 7.550895003887718e-06}},
        {0.0013389424469925735, 13.899999935511984, 0, {}, {2.7028417849926496e-10, -1.949684948438863e-07}},
        {0.0013389424469925735, 13.899999935511984, 1, {}, {-2.0186379533519242e-07, -2.804966652849773e-10}},
        {7.315420448145237, 7.532238954444989, 0, {}, {0.00012906219211986268, -2.0951255370497728e-05}},
        {7.315420448145237, 7.532238954444989, 1, {}, {-1.7519480199561477e-05, -0.0001341319894040465}},
        {11.513262425036064, 4.867729278858131, 0, {}, {-0.0007929862752299821, -0.0015358154548978018}},
        {11.513262425036064, 4.867729278858131, 1, {}, {-0.0015892526149251039, 0.0007500566456289169}},
    };
    for (const CylinderReference& r : refs) {
        const cplx z(r.x, r.y);
        EXPECT_LE(std::abs(hankel1_H(r.n, 0, z) - r.H), 2e-8 * std::abs(r.H)) << "z = " << z << " n = " << r.n;
    }
}

TEST(SmallArgument, BesselSeriesTruncationDecaysWithFifthPower) {
    std::vector<double> err0, err1;
    const std::vector<double> rs = {1e-1, 1e-2};
    for (double r : rs) {
        const cplx z = r * std::exp(I * 0.2);
        err0.push_back(std::abs(bessel_J(0, 0, z) - (1.0 - z * z / 4.0 + z * z * z * z / 64.0)));
        err1.push_back(std::abs(bessel_J(1, 0, z) - (z / 2.0 - z * z * z / 16.0)));
    }
    // J0 remainder is O(z^6) and J1 remainder O(z^5)
    EXPECT_NEAR(std::log10(err0[0] / err0[1]), 6.0, 0.3);
    EXPECT_NEAR(std::log10(err1[0] / err1[1]), 5.0, 0.3);
}

TEST(SmallArgument, HankelExpansionsWithGammaConstant) {
    const cplx g = gamma_constant();
    for (double r : {1e-2, 1e-3, 1e-4}) {
        const cplx z = r * std::exp(I * 0.1);
        const cplx lz = std::log(z);
        const cplx h0 = I * (g + 2.0 * lz) / pi - I * (-2.0 + g + 2.0 * lz) * z * z / (4.0 * pi);
        const cplx h1 = -2.0 * I / (z * pi) + I * (-1.0 + g + 2.0 * lz) * z / (2.0 * pi);
        const double bound = r * r * r * (1.0 + std::abs(lz));
        EXPECT_LT(std::abs(hankel1_H(0, 0, z) - h0), bound) << "r = " << r;
        EXPECT_LT(std::abs(hankel1_H(1, 0, z) - h1), bound + 1e-15 * std::abs(h1)) << "r = " << r;
    }
}

TEST(GammaConstant, Value) {
    const cplx g = gamma_constant();
    EXPECT_NEAR(g.real(), 2.0 * 0.5772156649015329 - 2.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(g.imag(), -pi, 1e-15);
}

TEST(SphericalBessel, ClosedFormsAndLimits) {
    expect_close(sph_bessel_j(0, 0, 0.0), 1.0, 0.0);
    expect_close(sph_bessel_j(1, 0, 0.0), 0.0, 0.0);
    expect_close(sph_bessel_j(0, 1, 0.0), 0.0, 0.0);
    EXPECT_LT(std::abs(sph_bessel_j(0, 0, pi)), 1e-16);
    EXPECT_NEAR(sph_bessel_j(1, 0, 0.2).real(), 0.0664003806703227, 1e-14);
    const double z = 0.2;
    EXPECT_NEAR(sph_bessel_j(1, 0, z).real(), z / 3.0 - z * z * z / 30.0, 2e-6);
}

TEST(SphericalBessel, SeriesBranchMatchesClosedForm) {
    for (int n : {0, 1})
        for (int d : {0, 1}) {
            const cplx zs = 0.9999 * std::exp(I * 0.4), zl = 1.0001 * std::exp(I * 0.4);
            const cplx zm = 0.5 * (zs + zl);
            const double h = 1e-5;
            const cplx slope = (sph_bessel_j(n, d, zm + h) - sph_bessel_j(n, d, zm - h)) / (2.0 * h);
            EXPECT_LT(std::abs(sph_bessel_j(n, d, zl) - sph_bessel_j(n, d, zs) - slope * (zl - zs)), 1e-12)
                << "n = " << n << " d = " << d;
        }
}

TEST(SphericalBessel, MatchHighPrecisionReference) {
    struct Ref {
        double x, y;
        int n, d;
        cplx v;
    };
    // sqrt(pi / 2z) J_{n+1/2}(z) and its derivative, 40-digit mpmath evaluations
    const Ref refs[] = {
        {0.009118503840628563, 0.0038552415888556406, 0, 0, {0.9999886192935655, -1.171793172943532e-05}},
        {0.009118503840628563, 0.0038552415888556406, 0, 1, {-0.0030394895603168474, -0.001285050384501722}},
        {0.009118503840628563, 0.0038552415888556406, 1, 0, {0.0030394895603168474, 0.001285050384501722}},
        {0.009118503840628563, 0.0038552415888556406, 1, 1, {0.33332650490920557, -7.030749893051101e-06}},
        {-0.2403430846640801, -0.17954164323118693, 0, 0, {0.9956885398469053, -0.014347048800554135}},
        {-0.2403430846640801, -0.17954164323118693, 0, 1, {0.08042344791518377, 0.059002827273030356}},
        {-0.2403430846640801, -0.17954164323118693, 1, 0, {-0.08042344791518377, -0.059002827273030356}},
        {-0.2403430846640801, -0.17954164323118693, 1, 1, {0.3307400039548605, -0.008604015860379868}},
        {0.9201399330088822, 0.38902892396634187, 0, 0, {0.884014696809673, -0.11115719782006087}},
        {0.9201399330088822, 0.38902892396634187, 0, 1, {-0.2941983830293957, -0.09977110283650743}},
        {0.9201399330088822, 0.38902892396634187, 1, 0, {0.2941983830293957, 0.09977110283650743}},
        {0.9201399330088822, 0.38902892396634187, 1, 1, {0.2637397166615341, -0.0657698595260967}},
        {0.9219820549968879, 0.3898077606509591, 0, 0, {0.8835499910495116, -0.11157040735664694}},
        {0.9219820549968879, 0.3898077606509591, 0, 1, {-0.29473528475821265, -0.09985502682906722}},
        {0.9219820549968879, 0.3898077606509591, 1, 0, {0.29473528475821265, 0.09985502682906722}},
        {0.9219820549968879, 0.3898077606509591, 1, 1, {0.2634609733350582, -0.06601045582208982}},
        {-1.6022872310938674, -1.196944288207913, 0, 0, {0.7089250766804096, -0.5591358822379618}},
        {-1.6022872310938674, -1.196944288207913, 0, 1, {0.5892488513593125, 0.14900947285697028}},
        {-1.6022872310938674, -1.196944288207913, 1, 0, {-0.5892488513593125, -0.14900947285697028}},
        {-1.6022872310938674, -1.196944288207913, 1, 1, {0.14767410273302098, -0.32586484658953646}},
    };
    for (const Ref& r : refs) expect_close(sph_bessel_j(r.n, r.d, cplx(r.x, r.y)), r.v, 1e-14);
}

TEST(SphericalHankel, ConventionAndLimits) {
    for (cplx z : {cplx(0.5, 0.0), cplx(2.0, -1.0), cplx(0.01, 0.02)})
        expect_close(z * sph_hankel1_h(0, 0, z) * std::exp(-I * z), -I, 1e-14);
    // -i k h0(k) j0(k) = -exp(ik) j0(k) = -1 + O(k)
    for (double k : {1e-3, 1e-5}) expect_close(-I * k * sph_hankel1_h(0, 0, k) * sph_bessel_j(0, 0, k), -1.0, 2.0 * k);
    const cplx z = 1e-3 * std::exp(I * 0.7);
    EXPECT_LT(std::abs(sph_hankel1_h(1, 0, z) - (-I / (z * z))) / std::abs(1.0 / (z * z)), 1e-5);
    EXPECT_THROW(sph_hankel1_h(0, 0, 0.0), SingularityError);
}

TEST(SphericalHankel, RecurrenceAtRandomPoints) {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> rad(std::log(0.01), std::log(10.0)), ang(-pi, pi);
    for (int i = 0; i < 100; ++i) {
        const cplx z = std::exp(rad(gen)) * std::exp(I * ang(gen));
        const cplx h1 = sph_hankel1_h(1, 0, z);
        EXPECT_LE(std::abs(h1 + sph_hankel1_h(0, 1, z)), 1e-12 * std::abs(h1));
    }
}

TEST(SphericalHankel, DerivativeOfOrderOne) {
    const cplx z(0.8, -0.3);
    const double h = 1e-6;
    const cplx fd = (sph_hankel1_h(1, 0, z + h) - sph_hankel1_h(1, 0, z - h)) / (2.0 * h);
    expect_close(sph_hankel1_h(1, 1, z), fd, 1e-8);
}
