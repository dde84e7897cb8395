#include <catch2/catch_amalgamated.hpp>

#include "szk/harness.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace szk;

namespace {

WeightedSphere s3_round() { return weighted_sphere(1, {1, 1}, MetricPreset::ambient_round); }
WeightedSphere w12() { return weighted_sphere(1, {1, 2}, MetricPreset::levi); }

} // namespace

TEST_CASE("config parsing: values, comments, malformed input") {
    auto cfg = Config::from_text("# experiment\n"
                                 "n = 1\n"
                                 "weights=1,2   # trailing comment\n"
                                 "\n"
                                 "m_range = 2:2:10\n"
                                 "delta=0.25\n"
                                 "points = stratum\n"
                                 "z = 0.4:0.1,0.2:-0.3\n");
    REQUIRE(cfg.get_int("n", 0) == 1);
    REQUIRE(cfg.get_int_list("weights", {}) == std::vector<long long>{1, 2});
    REQUIRE(cfg.get_range("m_range", {}) == std::vector<long long>{2, 4, 6, 8, 10});
    REQUIRE(cfg.get_double("delta", 0.0) == 0.25);
    REQUIRE(cfg.get_string("points", "") == "stratum");
    auto zs = cfg.get_cplx_list("z", {});
    REQUIRE(zs.size() == 2);
    REQUIRE(zs[0] == cplx(0.4, 0.1));
    REQUIRE(zs[1] == cplx(0.2, -0.3));
    REQUIRE(cfg.get_int("seed", 777) == 777); // default used when absent

    REQUIRE_THROWS_AS(Config::from_text("not_a_known_key = 3\n"), invalid_argument_error);
    REQUIRE_THROWS_AS(Config::from_text("just some words\n"), invalid_argument_error);
    REQUIRE_THROWS_AS(Config::from_text("n = abc\n").get_int("n", 0), invalid_argument_error);
    REQUIRE_THROWS_AS(Config::from_text("m_range = 5:0:9\n").get_range("m_range", {}),
                      invalid_argument_error);
    REQUIRE(Config::from_text("m_range = 7\n").get_range("m_range", {}) ==
            std::vector<long long>{7});
}

TEST_CASE("config file round trip") {
    const char* path = "harness_config_tmp.cfg";
    {
        std::ofstream f(path);
        f << "model = w12\nN = 2\nseed = 99\n";
    }
    auto cfg = Config::from_file(path);
    REQUIRE(cfg.get_string("model", "") == "w12");
    REQUIRE(cfg.get_int("N", 3) == 2);
    REQUIRE(cfg.get_int("seed", 0) == 99);
    std::remove(path);
    REQUIRE_THROWS_AS(Config::from_file("definitely_missing_file.cfg"), invalid_argument_error);
}

TEST_CASE("csv formatting: quoting and 17-digit round trip") {
    REQUIRE(csv_escape("plain") == "plain");
    REQUIRE(csv_escape("a,b") == "\"a,b\"");
    REQUIRE(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");

    double v = pi / 3.0;
    REQUIRE(std::stod(fmt_double(v)) == v); // 17 significant digits are lossless

    std::ostringstream os;
    csv_row(os, {"m", "value"});
    csv_row(os, {fmt_int(12), fmt_double(0.5)});
    REQUIRE(os.str() == "m,value\r\n12,0.5\r\n");
}

TEST_CASE("svg plot contains axes, labels, one polyline per series") {
    std::vector<SvgSeries> series{{"alpha", {{1.0, 1.0}, {10.0, 100.0}}},
                                  {"beta", {{1.0, 2.0}, {10.0, 0.5}}}};
    SvgAxes axes;
    axes.x_label = "m";
    axes.y_label = "value";
    axes.title = "demo";
    axes.log_x = true;
    axes.log_y = true;
    std::ostringstream os;
    write_svg_plot(os, series, axes);
    std::string s = os.str();
    REQUIRE(s.find("<svg") != std::string::npos);
    REQUIRE(s.find("</svg>") != std::string::npos);
    std::size_t count = 0, pos = 0;
    while ((pos = s.find("<polyline", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    REQUIRE(count == 2);
    REQUIRE(s.find("alpha") != std::string::npos);
    REQUIRE(s.find("m (log10)") != std::string::npos);
}

TEST_CASE("model and point sets from config") {
    auto cfg = Config::from_text("model = s3\n");
    auto X = model_from_config(cfg);
    REQUIRE(X.n == 1);
    REQUIRE(X.weights == std::vector<int>{1, 1});
    REQUIRE(X.preset == MetricPreset::ambient_round);

    auto cfg2 = Config::from_text("n = 1\nweights = 1,2\nmetric = levi\n");
    auto X2 = model_from_config(cfg2);
    REQUIRE(X2.weights == std::vector<int>{1, 2});
    REQUIRE_THROWS_AS(model_from_config(Config::from_text("model = nope\n")),
                      invalid_argument_error);

    // stratum point sits on the largest-weight axis
    auto pts = points_from_config(X2, Config::from_text("points = stratum\n"));
    REQUIRE(pts.size() == 1);
    REQUIRE(pts[0].z[0] == cplx(0.0));
    REQUIRE(pts[0].z[1] == cplx(1.0));

    // grid walks the first coordinate
    auto grid = points_from_config(X2, Config::from_text("points = grid:0.05:0.4:8\n"));
    REQUIRE(grid.size() == 8);
    REQUIRE(std::abs(grid.front().z[0]) == Catch::Approx(0.05).epsilon(1e-12));
    REQUIRE(std::abs(grid.back().z[0]) == Catch::Approx(0.4).epsilon(1e-12));
    for (const auto& x : grid)
        REQUIRE(point_norm(x.z) == Catch::Approx(1.0).margin(1e-12));

    // random points are deterministic in the seed
    auto ra = points_from_config(X2, Config::from_text("points = random:4\nseed = 5\n"));
    auto rb = points_from_config(X2, Config::from_text("points = random:4\nseed = 5\n"));
    auto rc = points_from_config(X2, Config::from_text("points = random:4\nseed = 6\n"));
    REQUIRE(ra.size() == 4);
    REQUIRE(ra[2].z[0] == rb[2].z[0]);
    REQUIRE(ra[2].z[0] != rc[2].z[0]);

    auto ex = points_from_config(X2, Config::from_text("points = explicit:0.6 0 0 0.8\n"));
    REQUIRE(ex.size() == 1);
    REQUIRE(ex[0].z[0] == cplx(0.6));
    REQUIRE(ex[0].z[1] == cplx(0.0, 0.8));
    REQUIRE_THROWS_AS(points_from_config(X2, Config::from_text("points = explicit:1 2 3\n")),
                      invalid_argument_error);
    REQUIRE_THROWS_AS(points_from_config(X2, Config::from_text("points = orbit\n")),
                      invalid_argument_error);
}

TEST_CASE("coefficient fit recovers an exact quadratic") {
    std::vector<std::pair<long long, double>> samples;
    for (long long m : {10, 15, 20, 25, 30, 35, 40})
        samples.emplace_back(m, 3.0 * m * m + 5.0 * m + 7.0);
    auto fit = fit_coefficients(samples, 2);
    REQUIRE(fit.b0 == Catch::Approx(3.0).margin(1e-9));
    REQUIRE(fit.b1 == Catch::Approx(5.0).margin(1e-9));
    REQUIRE(fit.b2 == Catch::Approx(7.0).margin(1e-9));

    // pure leading term comes back with vanishing lower coefficients
    std::vector<std::pair<long long, double>> lead;
    for (long long m : {12, 18, 24, 30, 36, 42})
        lead.emplace_back(m, 2.5 * m * m);
    auto fl = fit_coefficients(lead, 2);
    REQUIRE(fl.b0 == Catch::Approx(2.5).margin(1e-9));
    REQUIRE(fl.b1 == Catch::Approx(0.0).margin(1e-8));
    REQUIRE(fl.b2 == Catch::Approx(0.0).margin(1e-7));

    std::vector<std::pair<long long, double>> few = {{10, 1.0}, {20, 2.0}, {30, 3.0},
                                                     {40, 4.0}, {50, 5.0}};
    REQUIRE_THROWS_AS(fit_coefficients(few, 1), invalid_argument_error);
    std::vector<std::pair<long long, double>> dup(8, {10, 1.0});
    REQUIRE_THROWS_AS(fit_coefficients(dup, 1), invalid_argument_error);
}

TEST_CASE("coefficient fit on the round three-sphere components") {
    std::vector<std::pair<long long, double>> samples;
    for (long long m = 20; m <= 120; m += 20)
        samples.emplace_back(m, (m + 1) / (2.0 * pi * pi));
    auto fit = fit_coefficients(samples, 1);
    const double b = 1.0 / (2.0 * pi * pi);
    REQUIRE(fit.b0 == Catch::Approx(b).margin(1e-6));
    REQUIRE(fit.b1 == Catch::Approx(b).margin(1e-6));
    REQUIRE(fit.b2 == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("expansion run on the round sphere: tiny residuals and valid fit") {
    auto X = s3_round();
    std::mt19937_64 rng(31);
    auto x = random_sphere_point(X, rng);
    std::vector<long long> ms;
    for (long long m = 20; m <= 120; m += 20)
        ms.push_back(m);
    auto rep = run_expansion(X, {x}, ms, 3, 0.3);

    REQUIRE(rep.rows.size() == ms.size());
    for (const auto& row : rep.rows) {
        REQUIRE(row.sum_factor == 1);
        REQUIRE(row.stratum_r == 0);
        REQUIRE(row.exact ==
                Catch::Approx((row.m + 1) / (2.0 * pi * pi)).epsilon(1e-12));
        REQUIRE(std::abs(row.residual) < 1e-9);
    }
    REQUIRE(rep.points[0].fit_valid);
    const double b = 1.0 / (2.0 * pi * pi);
    REQUIRE(rep.points[0].fit.b0 == Catch::Approx(b).margin(1e-6));
    REQUIRE(rep.points[0].fit.b1 == Catch::Approx(b).margin(1e-6));
    REQUIRE(rep.points[0].fit.b2 == Catch::Approx(0.0).margin(1e-6));
    REQUIRE(rep.bound_C < 1e-6);
}

TEST_CASE("expansion run at the doubling stratum point of the (1,2) sphere") {
    auto X = w12();
    auto x = sphere_point({cplx(0.0), cplx(1.0)});
    std::vector<long long> ms;
    for (long long m = 2; m <= 120; ++m)
        ms.push_back(m);
    auto rep = run_expansion(X, {x}, ms, 2, 0.3);

    REQUIRE(rep.points[0].p_r == 2);
    REQUIRE(rep.points[0].d_hat == 0.0); // deepest stratum: no deeper gap
    double dev40 = 0.0, dev120 = 0.0;
    for (const auto& row : rep.rows) {
        if (row.m % 2 == 1) {
            REQUIRE(row.sum_factor == 0);
            REQUIRE(row.exact == 0.0); // exact cancellation, not merely small
            REQUIRE(row.prediction == 0.0);
        } else {
            REQUIRE(row.sum_factor == 2);
            REQUIRE(row.exact > 0.0);
            double dev = std::abs(row.exact / row.prediction - 1.0);
            if (row.m == 40)
                dev40 = dev;
            if (row.m == 120)
                dev120 = dev;
        }
    }
    REQUIRE(dev120 < dev40);
    REQUIRE(dev120 < 0.05);
    // kept Fourier components support a fit that matches the chart coefficients
    REQUIRE(rep.points[0].fit_valid);
    REQUIRE(rep.points[0].fit.b0 ==
            Catch::Approx(rep.points[0].coeffs.b0).epsilon(1e-3));
}

TEST_CASE("decay scan near the singular circle of the (1,2) sphere") {
    auto X = w12();
    auto pts = points_from_config(X, Config::from_text("points = grid:0.05:0.4:6\n"));
    std::vector<long long> ms;
    for (long long m = 11; m <= 141; m += 10)
        ms.push_back(m);
    auto scan = decay_scan(X, pts, ms);

    REQUIRE(scan.pass);
    REQUIRE(scan.eps0_hat > 0.0);
    REQUIRE(std::isfinite(scan.C));
    REQUIRE(scan.rows.size() == pts.size() * ms.size());
    for (const auto& row : scan.rows) {
        REQUIRE(row.m % 2 == 1);
        REQUIRE(row.deviation == std::abs(row.exact - row.prediction));
        REQUIRE(row.deviation <= row.envelope * (1.0 + 1e-12));
        REQUIRE(row.dist == Catch::Approx(std::asin(row.abs_z0)).margin(1e-12));
    }
    // the oscillating term dominates near the stratum: the kernel component
    // there sits well below its smooth prediction
    const auto& nearrow = scan.rows.front(); // m=11 at |z0| = 0.05
    REQUIRE(nearrow.exact < 0.2 * nearrow.prediction);

    // a free action has no singular stratum to approach
    REQUIRE_THROWS_AS(decay_scan(s3_round(), pts, ms), invalid_argument_error);
    // a point on the deepest stratum has no decay direction
    REQUIRE_THROWS_AS(decay_scan(X, {sphere_point({cplx(0.0), cplx(1.0)})}, ms),
                      invalid_argument_error);
}

TEST_CASE("circle average demo: vanishing when the weight misses the index") {
    // p does not divide m: the average is an exact Fourier-orthogonality zero
    auto r = oscillatory_demo(1, 2, {cplx(0.3, 0.1)}, 3);
    REQUIRE(r.exact == 0.0);
    REQUIRE(std::abs(r.quad) <= 1e-12 * 3.0);

    // centered point: every positive index integrates to zero
    for (long long m : {1, 2, 7}) {
        auto rc = oscillatory_demo(1, 1, {cplx(0.0)}, m);
        REQUIRE(rc.exact == 0.0);
        REQUIRE(std::abs(rc.quad) <= 1e-12 * std::pow((double)m, 1));
    }
}

TEST_CASE("circle average demo: closed form at |z|^2 = 1/2, m = 40") {
    auto r = oscillatory_demo(1, 1, {cplx(std::sqrt(0.5))}, 40);
    double expected = (80.0 / pi) * std::exp(-40.0 + 40.0 * std::log(40.0) - std::lgamma(41.0));
    REQUIRE(r.exact == Catch::Approx(expected).epsilon(1e-12));
    REQUIRE(std::abs(r.quad - r.exact) <= 1e-10 * std::abs(r.exact));
    REQUIRE(std::abs(r.quad.imag()) <= 1e-12 * std::abs(r.exact));
}

TEST_CASE("circle average demo: divisible index, two dimensions, guards") {
    auto r = oscillatory_demo(1, 2, {cplx(0.4, -0.2)}, 6);
    double z2 = 0.16 + 0.04;
    double a = 12.0 * z2;
    double expected = (12.0 / pi) * std::exp(-a) * std::pow(a, 3) / 6.0;
    REQUIRE(r.exact == Catch::Approx(expected).epsilon(1e-13));
    REQUIRE(std::abs(r.quad - r.exact) <= 1e-10 * std::abs(r.exact));

    auto r2 = oscillatory_demo(2, 1, {cplx(0.4), cplx(0.0, 0.3)}, 30);
    double z22 = 0.16 + 0.09;
    double a2 = 60.0 * z22;
    double e2 = std::exp(2.0 * std::log(60.0 / pi) - a2 + 30.0 * std::log(a2) -
                         std::lgamma(31.0));
    REQUIRE(r2.exact == Catch::Approx(e2).epsilon(1e-12));
    REQUIRE(std::abs(r2.quad - r2.exact) <= 1e-10 * std::abs(r2.exact));

    REQUIRE_THROWS_AS(oscillatory_demo(1, 0, {cplx(0.1)}, 5), invalid_argument_error);
    REQUIRE_THROWS_AS(oscillatory_demo(1, 1, {cplx(0.1)}, 0), invalid_argument_error);
    REQUIRE_THROWS_AS(oscillatory_demo(2, 1, {cplx(0.1)}, 5), invalid_argument_error);
    // deliberately starved quadrature trips the aliasing detector
    REQUIRE_THROWS_AS(oscillatory_demo(1, 1, {cplx(std::sqrt(0.5))}, 12, 4), numeric_error);
}

TEST_CASE("tangential gradient vanishes on the round sphere, stays bounded generally") {
    auto X = s3_round();
    std::mt19937_64 rng(7);
    auto x = random_sphere_point(X, rng);
    auto basis = monomial_norms(X, 30);
    double tn = tangential_gradient_norm(szego_gradient(X, basis, x), x.z);
    REQUIRE(tn < 1e-9); // the component is constant along the sphere

    auto Xw = w12();
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 3; ++i)
        pts.push_back(random_sphere_point(Xw, rng));
    auto env = gradient_envelope(Xw, pts, {20, 40, 80, 160});
    INFO("slope " << env.slope << " C " << env.C);
    REQUIRE(env.pass);
    REQUIRE(env.C > 0.0);
}

TEST_CASE("kernel and coefficient tables serialize deterministically") {
    auto X = w12();
    auto pts = points_from_config(X, Config::from_text("points = random:2\nseed = 11\n"));
    auto rows = run_kernel(X, pts, {2, 3, 4});
    std::ostringstream a, b;
    write_kernel_csv(a, rows);
    write_kernel_csv(b, run_kernel(X, pts, {2, 3, 4}));
    REQUIRE(a.str() == b.str());
    REQUIRE(a.str().rfind("m,point,stratum,sum_factor,dist,value\r\n", 0) == 0);

    auto crows = run_coeffs(X, pts);
    std::ostringstream c;
    write_coeffs_csv(c, crows, X.n);
    REQUIRE(c.str().rfind("point,chart,stratum,z0_re,z0_im,z1_re,z1_im,S_L,", 0) == 0);
    REQUIRE(crows[0].coeffs.b0 == Catch::Approx(1.0 / (2.0 * pi)).epsilon(1e-10));

    std::ostringstream e;
    auto rep = run_expansion(X, pts, {10, 20, 30, 40, 50, 60}, 3, 0.3);
    write_expansion_csv(e, rep);
    REQUIRE(e.str().rfind("m,point,stratum,p_r,sum_factor,dist,d_hat,exact,prediction,residual",
                          0) == 0);

    std::ostringstream svg;
    expansion_svg(svg, rep);
    REQUIRE(svg.str().find("</svg>") != std::string::npos);
}

TEST_CASE("invariant checks pass on both metric presets") {
    for (auto X : {s3_round(), w12()}) {
        auto lines = run_invariant_checks(X, 2024, 3);
        REQUIRE(lines.size() >= 6);
        for (const auto& line : lines) {
            INFO(line.name << ": " << line.detail);
            REQUIRE(line.pass);
        }
    }
}
