#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "genlink/dataset.hpp"

using namespace genlink;

namespace {

/// Writes `text` to a unique temp file and removes it on scope exit.
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& text) {
        static int counter = 0;
        path = "genlink_test_" + std::to_string(counter++) + ".tmp";
        std::ofstream(path) << text;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv records parse with quoting") {
    CHECK(parse_csv_record("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(parse_csv_record(R"("a,b",c)") == std::vector<std::string>{"a,b", "c"});
    CHECK(parse_csv_record(R"("say ""hi""",x)") ==
          std::vector<std::string>{"say \"hi\"", "x"});
    CHECK(parse_csv_record("") == std::vector<std::string>{""});
    CHECK(parse_csv_record("a,,b") == std::vector<std::string>{"a", "", "b"});
    CHECK(csv_escape("a,b") == R"("a,b")");
    CHECK(csv_escape("plain") == "plain");
}

TEST_CASE("csv entities accumulate values across repeated ids") {
    TempFile f("id,name,phone\n"
               "e1,Fontaine,434-5577\n"
               "e1,Fontaine's,\n"
               "e2,Adriano,555-0000\n");
    EntitySource src = load_entities(f.path, EntityFormat::Csv, Source::A);
    REQUIRE(src.size() == 2);
    const Entity* e1 = src.find("e1");
    REQUIRE(e1 != nullptr);
    CHECK(e1->values("name") == ValueSet{"Fontaine", "Fontaine's"});
    CHECK(e1->values("phone") == ValueSet{"434-5577"});  // empty fields dropped
    CHECK(src.property_names() == std::vector<std::string>{"name", "phone"});
}

TEST_CASE("csv without an id column is rejected") {
    TempFile f("name,phone\nx,y\n");
    CHECK_THROWS_WITH_AS(load_entities(f.path, EntityFormat::Csv, Source::A),
                         doctest::Contains("no id column"), DataError);
}

TEST_CASE("ntriples entities parse literals and escapes") {
    TempFile f("<http://x.org/e1> <http://x.org/name> \"Caf\xc3\xa9 \\\"Z\\\"\" .\n"
               "<http://x.org/e1> <http://x.org/type> <http://x.org/Restaurant> .\n"
               "<http://x.org/e2> <http://x.org/name> \"Plain\"@en .\n");
    EntitySource src = load_entities(f.path, EntityFormat::NTriples, Source::B);
    REQUIRE(src.size() == 2);
    const Entity* e1 = src.find("http://x.org/e1");
    REQUIRE(e1 != nullptr);
    CHECK(e1->values("http://x.org/type") == ValueSet{"http://x.org/Restaurant"});
    CHECK(e1->values("http://x.org/name") == ValueSet{"Café \"Z\""});
    CHECK(src.find("http://x.org/e2")->values("http://x.org/name") == ValueSet{"Plain"});
}

TEST_CASE("malformed ntriples lines carry their line number") {
    TempFile f("<a> <b> \"ok\" .\nnot a triple\n");
    try {
        load_entities(f.path, EntityFormat::NTriples, Source::A);
        FAIL("expected a parse error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("link files preserve order and reject duplicates and unknown ids") {
    TempFile ea("id,name\na1,x\na2,y\n");
    TempFile eb("id,name\nb1,x\nb2,y\n");
    EntitySource a = load_entities(ea.path, EntityFormat::Csv, Source::A);
    EntitySource b = load_entities(eb.path, EntityFormat::Csv, Source::B);

    TempFile good("source_id,target_id,label\na1,b1,+\na2,b2,+\na1,b2,-\n");
    auto links = load_links(good.path, a, b);
    REQUIRE(links.size() == 3);
    CHECK(links[0].positive);
    CHECK_FALSE(links[2].positive);
    ReferenceLinkSet split = split_labels(links);
    CHECK(split.positive.size() == 2);
    CHECK(split.negative.size() == 1);

    TempFile dup("source_id,target_id\na1,b1\na1,b1\n");
    CHECK_THROWS_AS(load_links(dup.path, a, b), DataError);
    TempFile dangling("source_id,target_id\na1,nope\n");
    CHECK_THROWS_WITH_AS(load_links(dangling.path, a, b), doctest::Contains("nope"),
                         DataError);
    TempFile badlabel("source_id,target_id,label\na1,b1,?\n");
    CHECK_THROWS_AS(load_links(badlabel.path, a, b), DataError);
}

TEST_CASE("negative links recombine consecutive pairs after the shuffle") {
    // Two links always yield the two crossed pairs, whatever the shuffle.
    std::vector<Link> two = {{"a", "b"}, {"c", "d"}};
    Rng rng(1);
    auto negatives = generate_negative_links(two, rng);
    std::set<Link> got(negatives.begin(), negatives.end());
    CHECK(got == std::set<Link>{{"a", "d"}, {"c", "b"}});
}

TEST_CASE("negative links never reproduce a positive and never repeat") {
    std::vector<Link> positives;
    for (int i = 0; i < 51; ++i)  // odd count exercises the leftover pairing
        positives.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    Rng rng(7);
    auto negatives = generate_negative_links(positives, rng);
    std::set<Link> pos(positives.begin(), positives.end());
    std::set<Link> seen;
    for (const Link& link : negatives) {
        CHECK(pos.count(link) == 0);
        CHECK(seen.insert(link).second);
    }
    CHECK(negatives.size() >= positives.size() - 1);

    Rng rng2(7);
    CHECK(generate_negative_links(positives, rng2) == negatives);  // seed-deterministic
}

TEST_CASE("fold splits are stratified, disjoint and exhaustive") {
    ReferenceLinkSet links;
    for (int i = 0; i < 10; ++i)
        links.positive.emplace_back("a" + std::to_string(i), "b" + std::to_string(i));
    for (int i = 0; i < 6; ++i)
        links.negative.emplace_back("a" + std::to_string(i), "b" + std::to_string(i + 1));

    Rng rng(3);
    auto folds = split_folds(links, 2, rng);
    REQUIRE(folds.size() == 2);
    CHECK(folds[0].positive.size() == 5);
    CHECK(folds[1].positive.size() == 5);
    CHECK(folds[0].negative.size() == 3);
    CHECK(folds[1].negative.size() == 3);

    std::set<Link> all;
    for (const auto& fold : folds) {
        for (const Link& l : fold.positive) CHECK(all.insert(l).second);
        for (const Link& l : fold.negative) CHECK(all.insert(l).second);
    }
    CHECK(all.size() == 16);

    auto [train, val] = train_validation_split(folds, 1);
    CHECK(train.positive == folds[0].positive);
    CHECK(val.negative == folds[1].negative);

    Rng rng2(3);
    auto folds2 = split_folds(links, 2, rng2);
    CHECK(folds2[0].positive == folds[0].positive);  // seed-deterministic
}
