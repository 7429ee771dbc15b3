#include <doctest.h>

#include "okrig/types.hpp"

using namespace okrig;

namespace {

RegistryPtr reg(std::initializer_list<std::string> ids) {
    return std::make_shared<const SampleRegistry>(std::vector<std::string>(ids));
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("registry rejects duplicates and empty ids") {
    CHECK_THROWS_AS(SampleRegistry({"a", "a"}), DuplicateId);
    CHECK_THROWS_AS(SampleRegistry({"a", ""}), ValidationError);
    SampleRegistry r({"b", "a"});
    CHECK(r.size() == 2);
    CHECK(r.find("a") == 1);
    CHECK(r.find("missing") == -1);
}

TEST_CASE("registry intersection sorts and intersects") {
    auto r1 = reg({"A", "B", "C"});
    auto r2 = reg({"B", "C", "D"});
    auto shared = intersect_registries({r1.get(), r2.get()});
    CHECK(shared->ids() == std::vector<std::string>{"B", "C"});
}

TEST_CASE("identical registries intersect to themselves sorted") {
    auto r1 = reg({"y", "x"});
    auto shared = intersect_registries({r1.get(), r1.get()});
    CHECK(shared->ids() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("disjoint registries raise EmptyIntersection") {
    auto r1 = reg({"A"});
    auto r2 = reg({"B"});
    CHECK_THROWS_AS(intersect_registries({r1.get(), r2.get()}), EmptyIntersection);
}

TEST_CASE("alignment preserves value-by-id pairs and is idempotent") {
    auto r1 = reg({"C", "A", "B"});
    Cohort c;
    c.registry = r1;
    c.phenotype.resize(3);
    c.phenotype << 3.0, 1.0, 2.0;  // value i matches id alphabetically

    auto r2 = reg({"B", "C", "D"});
    auto shared = intersect_registries({r1.get(), r2.get()});
    Cohort aligned = align_to(c, shared);
    REQUIRE(aligned.registry->ids() == std::vector<std::string>{"B", "C"});
    CHECK(aligned.phenotype(0) == 2.0);
    CHECK(aligned.phenotype(1) == 3.0);

    Cohort twice = align_to(aligned, shared);
    CHECK(twice.registry->ids() == aligned.registry->ids());
    CHECK(twice.phenotype == aligned.phenotype);
}

TEST_CASE("dataset alignment reindexes rows and refreshes frequencies") {
    auto r1 = reg({"s1", "s2", "s3"});
    OmicDataset d;
    d.registry = r1;
    d.kind = OmicKind::GenotypeDosage;
    d.values.resize(3, 2);
    d.values << 0, 2, 1, 1, 2, 0;
    d.missing = BoolArray::Constant(3, 2, false);
    d.marker_ids = {"m1", "m2"};
    d.allele_freqs = dosage_allele_freqs(d.values, d.missing);

    auto target = reg({"s1", "s3"});
    OmicDataset a = align_to(d, target);
    CHECK(a.values(0, 0) == 0);
    CHECK(a.values(1, 0) == 2);
    CHECK(a.allele_freqs(0) == doctest::Approx(0.5));
}

TEST_CASE("similarity matrix alignment permutes both dimensions") {
    auto r1 = reg({"a", "b", "c"});
    SimilarityMatrix s;
    s.registry = r1;
    s.values.resize(3, 3);
    s.values << 1.0, 0.1, 0.2, 0.1, 1.0, 0.3, 0.2, 0.3, 1.0;
    auto target = reg({"c", "a"});
    SimilarityMatrix a = align_to(s, target);
    CHECK(a.values(0, 0) == 1.0);
    CHECK(a.values(0, 1) == 0.2);
    CHECK(a.values(1, 0) == 0.2);
}

TEST_CASE("weight config invariants") {
    WeightConfig w;
    w.component_weights = {{"g", 0.3}, {"t", 0.4}};
    w.validate();
    CHECK(w.sum() == doctest::Approx(0.7));
    CHECK(w.nugget() == doctest::Approx(0.3));

    WeightConfig negative;
    negative.component_weights = {{"g", -0.1}};
    CHECK_THROWS_AS(negative.validate(), BadTheta);

    WeightConfig heavy;
    heavy.component_weights = {{"g", 0.6}, {"t", 0.6}};
    CHECK_THROWS_AS(heavy.validate(), WeightSumExceedsOne);
}

TEST_CASE("binary cohort coding is checked") {
    Cohort c;
    c.registry = reg({"a", "b"});
    c.trait_kind = TraitKind::Binary;
    c.phenotype.resize(2);
    c.phenotype << 0.0, 2.0;
    CHECK_THROWS_AS(c.validate(), CodingError);
}

TEST_CASE("similarity symmetry tolerance") {
    SimilarityMatrix s;
    s.registry = reg({"a", "b"});
    s.values.resize(2, 2);
    s.values << 1.0, 0.5, 0.5 + 1e-8, 1.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s.validate_or_symmetrize();  // small asymmetry is repaired
    CHECK(s.values(0, 1) == s.values(1, 0));
}

}  // TEST_SUITE
