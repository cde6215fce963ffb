#include "edgeavail/error.hpp"
#include "edgeavail/model_format.hpp"
#include "edgeavail/models.hpp"
#include "edgeavail/statespace.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace edgeavail;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* two_state_doc = R"~(san-format 1
param lambda = 0.1; param mu = 0.9
place Up = 1; place Down = 0
activity timed fail rate "lambda" { input "#Up >= 1" { Up -= 1 } case 1 { Down += 1 } }
activity timed repair rate "mu" { input "#Down >= 1" { Down -= 1 } case 1 { Up += 1 } }
reward up = "#Up >= 1"
)~";

} // namespace

TEST_CASE("parses a compact two-state document")
{
    SanModel m = parse_model(two_state_doc);
    CHECK(m.places().size() == 2);
    CHECK(m.activities().size() == 2);
    CHECK(*m.parameter("mu") == 0.9);
    CHECK(m.reward("up") != nullptr);
    CHECK(parse_model(serialize_model(m)) == m);
}

TEST_CASE("parameters fold earlier parameters")
{
    SanModel m = parse_model(R"~(san-format 1
param hours_per_month = 730
param lambda = "1 / (2 * hours_per_month)"
param mu = 1.5e0
place Up = 1
place Down = 0
activity timed fail rate "lambda" { input "#Up >= 1" { Up -= 1 } case 1 { Down += 1 } }
activity timed repair rate "mu" { input "#Down >= 1" { Down -= 1 } case 1 { Up += 1 } }
reward up = "#Up >= 1"
)~");
    CHECK(*m.parameter("lambda") == 1.0 / 1460.0);
    CHECK_THROWS_AS(parse_model("san-format 1\nparam a = \"b + 1\"\nparam b = 1\n"), SemanticError);
}

TEST_CASE("instantaneous activities and multi-case effects")
{
    SanModel m = parse_model(R"~(san-format 1
param c = 0.85
place A = 1
place B = 0
place C = 0
activity instant split {
  input "#A >= 1" { A -= 1 }
  case "c" { B += 1 }
  case "1 - c" { C = 1 }
}
activity timed back rate 2 { input "#B + #C >= 1" { B = 0; C = 0 } case 1 { A += 1 } }
reward up = "#A + #B >= 1"
)~");
    REQUIRE(m.activities().size() == 2);
    CHECK_FALSE(m.activities()[0].is_timed());
    CHECK(m.activities()[0].cases.size() == 2);
    CHECK(m.activities()[0].cases[1].effects[0].op == Effect::Op::assign);
    CHECK(parse_model(serialize_model(m)) == m);
}

TEST_CASE("semantic errors")
{
    CHECK_THROWS_AS(parse_model(R"~(san-format 1
place Up = 1
activity timed fail rate 1 { input "#Gone >= 1" { Up -= 1 } case 1 { Up += 1 } }
)~"),
                    SemanticError);
    CHECK_THROWS_AS(parse_model("san-format 1\nplace A = 1\nplace A = 2\n"), SemanticError);
    CHECK_THROWS_AS(parse_model(R"~(san-format 1
place A = 1
activity timed t rate 1 { case 0.5 { A += 1 } case 0.6 { A += 1 } }
)~"),
                    SemanticError);
}

TEST_CASE("syntax errors point into the document")
{
    try
    {
        parse_model("san-format 1\nplace A = 1\nreward up = \"#A >= \"\n");
        FAIL("expected SyntaxError");
    }
    catch (const SyntaxError& e)
    {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_model("place A = 1\n"), SyntaxError);
    CHECK_THROWS_AS(parse_model("san-format 2\n"), SemanticError);
    CHECK_THROWS_AS(parse_model("san-format 1\nplace A = 1.5\n"), SyntaxError);
    CHECK_THROWS_AS(parse_model("san-format 1\nactivity timed t { case 1 { } }\n"), SyntaxError);
    CHECK_THROWS_AS(parse_model("san-format 1\nplace A = 1\nactivity timed t rate 1 { case 1 { A *= 1 } }\n"),
                    SyntaxError);
    CHECK_THROWS_AS(parse_model("san-format 1\ndescription \"unterminated\n"), SyntaxError);
}

TEST_CASE("built-in models round-trip through the document format")
{
    auto t = IntensityTable::defaults();
    for (ElementKind k : all_element_kinds)
    {
        SanModel m = build_element(k, t);
        std::string doc = serialize_model(m);
        SanModel back = parse_model(doc);
        CHECK_MESSAGE(back == m, to_string(k));
        CHECK(serialize_model(back) == doc);
    }
    SanModel odd = build_cluster(t, 3, 2, 0.5, 2.0, 10.0);
    CHECK(parse_model(serialize_model(odd)) == odd);
}

TEST_CASE("shipped documents match the builders")
{
    auto t = IntensityTable::defaults();
    const std::pair<const char*, SanModel> shipped[] = {
        {"ru.san", build_ru(t)},   {"du.san", build_du(t)},          {"cu.san", build_cu(t)},
        {"meh.san", build_meh(t)}, {"cluster.san", build_cluster(t)},
    };
    for (const auto& [file, model] : shipped)
    {
        fs::path p = fs::path(EDGEAVAIL_MODELS_DIR) / file;
        REQUIRE_MESSAGE(fs::exists(p), p.string());
        std::string text = read_file(p);
        SanModel loaded = parse_model(text);
        CHECK_MESSAGE(loaded == model, file);
        CHECK_MESSAGE(serialize_model(loaded) == text, file);
    }
    StateGraph ru = explore(load_model(fs::path(EDGEAVAIL_MODELS_DIR) / "ru.san"));
    CHECK(ru.tangible_count() == 4);
    CHECK(ru.vanishing_count() == 0);
}

TEST_CASE("test documents")
{
    SanModel two = load_model(fs::path(EDGEAVAIL_TEST_DATA) / "two_state.san");
    CHECK(two.description() == "two-state component");
    CHECK_THROWS_AS(load_model(fs::path(EDGEAVAIL_TEST_DATA) / "broken.san"), SemanticError);
    CHECK_THROWS_AS(load_model(fs::path(EDGEAVAIL_TEST_DATA) / "missing.san"), Error);
}
