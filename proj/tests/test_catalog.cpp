#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "phasex/errors.hpp"
#include "phasex/pass_catalog.hpp"

#include <set>
#include <string>
#include <vector>

using namespace phasex;

TEST_CASE("bundled optimizer catalog loads") {
    const PassCatalog cat = PassCatalog::load(test::bundled_catalog());
    CHECK(cat.size() == 140);
    CHECK(cat.source_label() == "llvm-3.7.1-passes.txt");

    std::set<std::string> unique;
    for (const auto& p : cat.passes()) {
        CHECK(p.name.size() > 1);
        CHECK(p.name[0] == '-');
        unique.insert(p.name);
    }
    CHECK(unique.size() == cat.size());

    CHECK(cat.at(0).name == "-aa-eval");
    CHECK(cat.at(cat.size() - 1).name == "-verify");
    CHECK(cat.find("-licm").has_value());
    CHECK(cat.find("-loop-unroll").has_value());
    CHECK_FALSE(cat.find("licm").has_value());
    CHECK_FALSE(cat.find("-no-such-pass").has_value());

    // Indices are positional and find() inverts at().
    for (std::size_t i = 0; i < cat.size(); ++i) {
        CHECK(cat.at(i).index == i);
        CHECK(cat.find(cat.at(i).name) == i);
    }
}

TEST_CASE("file parsing skips comments blanks and padding") {
    test::TempDir tmp;
    const auto path = tmp / "cat.txt";
    test::write_text(path, "# header\n\n  -one  \n-two\n   # trailing comment\n-three\n\n");
    const PassCatalog cat = PassCatalog::load(path);
    CHECK(cat.names() == std::vector<std::string>{"-one", "-two", "-three"});
    CHECK(cat.source_label() == "cat.txt");
}

TEST_CASE("malformed catalogs are rejected") {
    test::TempDir tmp;

    const auto dup = tmp / "dup.txt";
    test::write_text(dup, "-a\n-b\n-a\n");
    CHECK_THROWS_AS(PassCatalog::load(dup), ConfigError);

    const auto empty = tmp / "empty.txt";
    test::write_text(empty, "# nothing but comments\n\n");
    CHECK_THROWS_AS(PassCatalog::load(empty), ConfigError);

    const auto nodash = tmp / "nodash.txt";
    test::write_text(nodash, "-a\nbare-name\n");
    CHECK_THROWS_AS(PassCatalog::load(nodash), ConfigError);

    CHECK_THROWS_AS(PassCatalog::load(tmp / "missing.txt"), Error);

    CHECK_THROWS_AS(PassCatalog::from_names({}, "inline"), ConfigError);
    CHECK_THROWS_AS(PassCatalog::from_names({"-a", ""}, "inline"), ConfigError);
}

TEST_CASE("sequence rendering resolves indices in order") {
    const PassCatalog cat = PassCatalog::from_names({"-a", "-b", "-c"}, "inline");

    PassSequence seq{{2, 0, 0, 1}, SequenceOrigin::manual};
    CHECK(render_sequence(cat, seq) == std::vector<std::string>{"-c", "-a", "-a", "-b"});

    CHECK(render_sequence(cat, PassSequence{}).empty());

    PassSequence bad{{3}, SequenceOrigin::manual};
    CHECK_THROWS_AS(render_sequence(cat, bad), ConfigError);
}

TEST_CASE("origin labels round-trip") {
    for (auto origin : {SequenceOrigin::random, SequenceOrigin::model,
                        SequenceOrigin::standard_level, SequenceOrigin::manual})
        CHECK(sequence_origin_from_string(to_string(origin)) == origin);
    CHECK_THROWS_AS(sequence_origin_from_string("bogus"), ConfigError);
}
