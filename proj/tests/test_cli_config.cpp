#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pseudotor/config.hpp"
#include "pseudotor/errors.hpp"
#include "pseudotor/jsonout.hpp"

using namespace pseudotor;

TEST_CASE("config round trip through the key-value format") {
    const RunConfig a = RunConfig::defaults();
    std::ostringstream s1;
    a.dump(s1);
    const std::string path = "config_roundtrip.tmp";
    {
        std::ofstream f(path);
        f << s1.str();
    }
    const RunConfig b = RunConfig::load(path);
    std::ostringstream s2;
    b.dump(s2);
    CHECK(s1.str() == s2.str());
    std::remove(path.c_str());
}

TEST_CASE("config overrides and validation") {
    RunConfig c = RunConfig::defaults();
    c.set("fiber.n_gamma", "16");
    CHECK(c.n_gamma == 16);
    c.set("seed", "42");
    CHECK(c.seed == 42);
    c.set("h.mode", "symbol");
    CHECK_NOTHROW(c.validate());
    c.set("h.mode", "nonsense");
    CHECK_THROWS_AS(c.validate(), UsageError);

    RunConfig bad = RunConfig::defaults();
    bad.f1_lambda_y = {0.0, 0.0, 0.0};  // breaks the balance condition
    CHECK_THROWS_AS(bad.validate(), UsageError);

    RunConfig negative = RunConfig::defaults();
    negative.r2 = 0.5;  // r2 must stay below r1
    CHECK_THROWS_AS(negative.validate(), UsageError);

    CHECK_THROWS_AS(c.set("no.such.key", "1"), UsageError);
}

TEST_CASE("json writer is deterministic with 17 significant digits") {
    auto build = [] {
        JsonWriter j;
        j.begin_object();
        j.key("a").value(1.0 / 3.0);
        j.key("b").value(true);
        j.key("list").begin_array().value(1).value(2).end_array();
        j.key("s").value("quote\"slash\\");
        j.end_object();
        return j.str();
    };
    const std::string one = build(), two = build();
    CHECK(one == two);
    CHECK(one.find("0.33333333333333331") != std::string::npos);
    CHECK(one.find("\"quote\\\"slash\\\\\"") != std::string::npos);
    CHECK(one == R"({"a":0.33333333333333331,"b":true,"list":[1,2],"s":"quote\"slash\\"})");
}
