#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrgark/json_io.hpp"
#include "mrgark/order.hpp"
#include "mrgark/problems.hpp"
#include "mrgark/schemes.hpp"
#include "test_support.hpp"

using namespace mrgark;

TEST_CASE("scheme JSON round trip is bit exact") {
    testing::Rng rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        const MrGarkScheme s = testing::random_scheme(rng);
        const MrGarkScheme back = scheme_from_json(scheme_to_json(s));
        CHECK(back.M() == s.M());
        CHECK(back.fast().A() == s.fast().A());
        CHECK(back.fast().b() == s.fast().b());
        CHECK(back.slow().A() == s.slow().A());
        for (int lam = 1; lam <= s.M(); ++lam) {
            CHECK(back.coupling_fs(lam) == s.coupling_fs(lam));
            CHECK(back.coupling_sf(lam) == s.coupling_sf(lam));
        }
    }
}

TEST_CASE("rational strings parse with a single rounding") {
    const std::string text = R"({
        "fast": {"A": [["0", "0"], ["1", "0"]], "b": ["1/2", "1/2"]},
        "slow": {"A": [["1/4", "-1/4"], ["1/4", "5/12"]], "b": ["1/4", "3/4"]},
        "M": 1,
        "couplings_fs": [[[0, 0], [0, 0]]],
        "couplings_sf": [[[0, 0], [0, 0]]]
    })";
    const MrGarkScheme s = scheme_from_json(text);
    CHECK(s.slow().A()(1, 1) == rat(5, 12));
    CHECK(s.slow().b()(1) == 0.75);
    CHECK(s.fast().b()(0) == 0.5);
}

TEST_CASE("malformed scheme files raise descriptive errors") {
    CHECK_THROWS(scheme_from_json("{}"));
    CHECK_THROWS(scheme_from_json(R"({"fast": {"A": [[0]], "b": [1, 2]},
        "slow": {"A": [[0]], "b": [1]}, "M": 1,
        "couplings_fs": [[[0]]], "couplings_sf": [[[0]]]})"));
    CHECK_THROWS_AS(scheme_from_json(R"({"fast": {"A": [["1/0"]], "b": [1]},
        "slow": {"A": [[0]], "b": [1]}, "M": 1,
        "couplings_fs": [[[0]]], "couplings_sf": [[[0]]]})"),
                    std::invalid_argument);
    CHECK_THROWS(load_scheme_file("/nonexistent/scheme.json"));
}

TEST_CASE("order reports serialize with stable condition ids") {
    const OrderReport rep = slow_order_residuals(make_mrk_radau1a(2));
    const std::string text = order_report_to_json(rep);
    CHECK(text.find("\"T1.1\"") != std::string::npos);
    CHECK(text.find("\"T1.11\"") != std::string::npos);
    CHECK(text.find("classified_order") != std::string::npos);
}

TEST_CASE("trajectory CSV lists time then components") {
    const PartitionedIvp ivp = make_linear2();
    const Trajectory traj =
        integrate(MrGarkStepper(make_ssp2_mr(2, Ssp2Coupling::LastSlow)), ivp, 0.2, 0.1);
    const std::string csv = trajectory_to_csv(traj);
    CHECK(csv.rfind("t,y0,y1\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 states
}

TEST_CASE("trajectory JSON carries the evaluation counters") {
    const PartitionedIvp ivp = make_linear2();
    const Trajectory traj =
        integrate(MrGarkStepper(make_ssp2_mr(2, Ssp2Coupling::LastSlow)), ivp, 0.2, 0.1);
    const std::string text = trajectory_to_json(traj);
    CHECK(text.find("rhs_fast_evals") != std::string::npos);
    CHECK(text.find("newton_iters") != std::string::npos);
}
