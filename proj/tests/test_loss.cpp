/* Copyright 2026 the cfarkit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch2/catch_amalgamated.hpp>

#include "cfarkit/loss.hpp"

using namespace cfarkit;

TEST_CASE("chi is the base-10 exponent of the pfa") {
    REQUIRE(chi(1e-6) == Catch::Approx(6.0));
    REQUIRE(chi(0.1) == Catch::Approx(1.0));
    REQUIRE(chi(0.999) == Catch::Approx(0.0).margin(1e-3));
    REQUIRE_THROWS_AS(chi(0.0), InvalidPfa);
    REQUIRE_THROWS_AS(chi(1.0), InvalidPfa);
}

TEST_CASE("k table") {
    REQUIRE(k_lookup(Strategy::CA, Law::Square) == 0.0);
    REQUIRE(k_lookup(Strategy::CA, Law::Linear) == 0.09);
    REQUIRE(k_lookup(Strategy::CA, Law::Log) == 0.65);
    REQUIRE(k_lookup(Strategy::GOCA, Law::Square) == 0.37);
    REQUIRE(k_lookup(Strategy::GOCA, Law::Linear) == 0.5);
    REQUIRE(k_lookup(Strategy::GOCA, Law::Log) == 1.26);
    REQUIRE_THROWS_AS(k_lookup(Strategy::SOCA, Law::Square), NotTabulated);
    REQUIRE_THROWS_AS(k_lookup(Strategy::OS, Law::Log), NotTabulated);
}

TEST_CASE("effective reference count and cfar ratio") {
    REQUIRE(effective_reference_count(56, 0.0) == Catch::Approx(56.0));
    REQUIRE(effective_reference_count(56, 0.65) == Catch::Approx(34.333).margin(1e-3));
    REQUIRE(cfar_ratio(6.0, 56.65 / 1.65) == Catch::Approx(0.17476).margin(1e-5));

    SECTION("discounting never helps") {
        for (int m : {1, 8, 56, 500})
            for (double k : {0.0, 0.09, 0.65, 1.26}) {
                const double me = effective_reference_count(m, k);
                REQUIRE(me <= m + 1e-12);
                if (k == 0.0) REQUIRE(me == Catch::Approx(double(m)));
                if (k > 0.0 && m > 1) REQUIRE(me < m);
            }
    }
    SECTION("ratio falls as the ring grows") {
        double prev = 1e30;
        for (int m : {8, 16, 56, 120, 500}) {
            const double r = cfar_ratio(chi(1e-3), effective_reference_count(m, 0.65));
            REQUIRE(r < prev);
            prev = r;
        }
    }
}

TEST_CASE("log-detector ring inflation") {
    REQUIRE(log_detector_boundary(1) == 1);
    REQUIRE(log_detector_boundary(56) == 92);
    REQUIRE(log_detector_boundary(16) == 26);
    SECTION("never below the linear requirement, nondecreasing") {
        int prev = 0;
        for (int n = 1; n <= 200; ++n) {
            const int nl = log_detector_boundary(n);
            REQUIRE(nl >= n);
            REQUIRE(nl >= prev);
            prev = nl;
        }
    }
    REQUIRE_THROWS_AS(log_detector_boundary(0), std::invalid_argument);
}
