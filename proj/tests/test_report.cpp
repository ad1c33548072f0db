#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "report.hpp"

using namespace dsinfer::cli;

TEST_SUITE("report") {

TEST_CASE("doubles round trip") {
    for (double x : {0.1, 1.0 / 3.0, 2.5e-300, -7.0, 0.0, 123456789.123456789}) {
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("row width is enforced") {
    Table t("t", {"a", "b"});
    CHECK_NOTHROW(t.add({1.0, std::string("x")}));
    CHECK_THROWS_AS(t.add({1.0}), std::logic_error);
}

TEST_CASE("CSV layout") {
    Report r;
    r.command = "demo";
    r.config = {{"seed", 1}};
    Table a("first", {"name", "value", "flag"});
    a.add({std::string("with,comma"), 0.5, true});
    a.add({std::string("say \"hi\""), std::numeric_limits<double>::quiet_NaN(), false});
    Table b("second", {"n"});
    b.add({std::uint64_t{3}});
    r.tables = {a, b};
    std::ostringstream out;
    write_csv(r, out);
    const std::string s = out.str();
    CHECK(s.find("# command: demo\n") != std::string::npos);
    CHECK(s.find("# config: {\"seed\":1}\n") != std::string::npos);
    CHECK(s.find("# table: first\nname,value,flag\n\"with,comma\",0.5,true\n") != std::string::npos);
    CHECK(s.find("\"say \"\"hi\"\"\",nan,false\n") != std::string::npos);
    CHECK(s.find("false\n\n# table: second\nn\n3\n") != std::string::npos);
}

TEST_CASE("JSON layout") {
    Report r;
    r.command = "demo";
    r.config = {{"seed", 2}};
    Table a("only", {"x", "i"});
    a.add({INFINITY, std::int64_t{-4}});
    a.add({0.25, std::int64_t{5}});
    r.tables = {a};
    std::ostringstream out;
    write_json(r, out);
    const auto doc = nlohmann::json::parse(out.str());
    CHECK(doc["command"] == "demo");
    CHECK(doc["config"]["seed"] == 2);
    CHECK(doc["tables"]["only"]["columns"][0] == "x");
    CHECK(doc["tables"]["only"]["rows"][0][0].is_null());
    CHECK(doc["tables"]["only"]["rows"][0][1] == -4);
    CHECK(doc["tables"]["only"]["rows"][1][0] == 0.25);
}

}  // TEST_SUITE
