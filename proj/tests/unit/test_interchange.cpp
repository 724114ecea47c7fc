// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "geodiv/error.hpp"
#include "geodiv/interchange.hpp"
#include "records.hpp"
#include "tempdir.hpp"

using namespace geodiv;
namespace ix = geodiv::interchange;

namespace {

const char* kGood =
    R"({"image_id":"a1","dataset":"low_resource","source":"geode","topic":"bike","country":"Peru","rep_type":"clip","vector":[1,0,0]})"
    "\n"
    R"({"image_id":"h1","dataset":"high_resource","source":"imagenet","topic":"bike","country":null,"rep_type":"clip","vector":[0.5,0.5,0]})"
    "\n";

IngestError parse_error(const std::string& text) {
    ix::DimensionRegistry dims;
    try {
        ix::read_text(text, "mem.jsonl", dims);
    } catch (const IngestError& e) {
        return e;
    }
    FAIL("expected IngestError");
    return IngestError("", 0, "", "");
}

}  // namespace

TEST_CASE("reads records") {
    ix::DimensionRegistry dims;
    const auto rs = ix::read_text(kGood, "mem", dims);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].image_id == "a1");
    CHECK(rs[0].country == "Peru");
    CHECK(rs[1].dataset == Dataset::high_resource);
    CHECK_FALSE(rs[1].country.has_value());
    CHECK(dims.at("clip") == 3);
}

TEST_CASE("blank lines are skipped") {
    ix::DimensionRegistry dims;
    CHECK(ix::read_text(std::string("\n") + kGood + "\n\n", "mem", dims).size() == 2);
}

TEST_CASE("errors name file, line and field") {
    SUBCASE("missing field") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"low_resource","source":"s","country":"x","rep_type":"r","vector":[1]})");
        CHECK(e.file() == "mem.jsonl");
        CHECK(e.line() == 1);
        CHECK(e.field() == "topic");
    }
    SUBCASE("dimension mismatch on line 2") {
        const auto e = parse_error(std::string(kGood).substr(0, std::string(kGood).find('\n') + 1) +
                                   R"({"image_id":"b","dataset":"low_resource","source":"s","topic":"t","country":"x","rep_type":"clip","vector":[1,2]})");
        CHECK(e.line() == 2);
        CHECK(e.field() == "vector");
    }
    SUBCASE("zero vector") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"low_resource","source":"s","topic":"t","country":"x","rep_type":"r","vector":[0,0]})");
        CHECK(e.field() == "vector");
    }
    SUBCASE("non-numeric element") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"low_resource","source":"s","topic":"t","country":"x","rep_type":"r","vector":[1,"x"]})");
        CHECK(e.field() == "vector");
    }
    SUBCASE("high-resource record with a country") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"high_resource","source":"s","topic":"t","country":"x","rep_type":"r","vector":[1]})");
        CHECK(e.field() == "country");
    }
    SUBCASE("low-resource record without a country") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"low_resource","source":"s","topic":"t","country":null,"rep_type":"r","vector":[1]})");
        CHECK(e.field() == "country");
    }
    SUBCASE("unknown dataset") {
        const auto e = parse_error(R"({"image_id":"a","dataset":"medium","source":"s","topic":"t","country":"x","rep_type":"r","vector":[1]})");
        CHECK(e.field() == "dataset");
    }
    SUBCASE("not json") {
        const auto e = parse_error("{oops");
        CHECK(e.line() == 1);
    }
}

TEST_CASE("non-finite values never survive a round trip") {
    // JSON cannot spell NaN; the writer must refuse rather than emit null.
    auto r = rec::low("a", "t", "c", "r", {1.0, std::numeric_limits<double>::quiet_NaN()});
    CHECK_THROWS(ix::record_to_line(r));
}

TEST_CASE("record_to_line round trips exactly") {
    const auto r = rec::low("id/1", "topic", "chad", "clip", {0.1, -2.5e-7, 3.0});
    ix::DimensionRegistry dims;
    const auto back = ix::read_text(ix::record_to_line(r) + "\n", "mem", dims);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);
}

TEST_CASE("packed sidecar round trip") {
    test::TempDir dir;
    std::vector<EmbeddingRecord> rs{rec::low("a", "t", "c", "clip", {0.5, 0.25}), rec::high("b", "t", "clip", {1, 2}),
                                    rec::low("c", "t", "c", "blip", {1, 2, 3})};
    const auto path = dir.path() / "store.jsonl";
    ix::write_file(path, rs, true);
    CHECK(std::filesystem::exists(ix::sidecar_path(path, "clip")));
    CHECK(std::filesystem::exists(ix::sidecar_path(path, "blip")));
    ix::DimensionRegistry dims;
    const auto back = ix::read_file(path, dims);
    CHECK(back == rs);  // values chosen to be exact in float32
}

TEST_CASE("sidecar header is validated") {
    test::TempDir dir;
    ix::SidecarMatrix m{"clip", 2, {1, 2, 3, 4}};
    const auto p = dir.path() / "x.clip.f32";
    ix::write_sidecar(p, m);
    const auto back = ix::read_sidecar(p);
    CHECK(back.rep_type == "clip");
    CHECK(back.rows() == 2);
    CHECK(back.values == m.values);

    std::ofstream(dir.path() / "bad.f32") << "NOTMAGIC";
    CHECK_THROWS_AS(ix::read_sidecar(dir.path() / "bad.f32"), IoError);
}

TEST_CASE("missing file is an io error naming the path") {
    ix::DimensionRegistry dims;
    try {
        ix::read_file("/no/such/file.jsonl", dims);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/no/such/file.jsonl") != std::string::npos);
    }
}
