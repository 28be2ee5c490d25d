#include "support.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace premsel;
using namespace premsel::test;

TEST(FeatureWeight, Formula)
{
	std::vector<FeatureSet> docs;
	for(int i = 0; i < 100; ++i)
		docs.push_back(FeatureSet({"T:common", "T:d" + std::to_string(i)}));
	FeatureIndex idx(docs);
	EXPECT_EQ(idx.doc_count(), 100u);
	EXPECT_NEAR(feature_weight("T:d7", idx), 21.2076, 1e-4);
	EXPECT_EQ(feature_weight("T:common", idx), 0.0);
	EXPECT_EQ(feature_weight("T:unseen", idx), 0.0);
	EXPECT_EQ(idx.doc_freq("T:common"), 100u);
	EXPECT_EQ(idx.postings("T:d7").size(), 1u);
	EXPECT_EQ(idx.postings("T:d7")[0], 7u);
	EXPECT_TRUE(idx.postings("T:unseen").empty());
}

TEST(FeatureIndex, Invariants)
{
	Gen g(8);
	auto c = random_corpus(g, 60);
	std::vector<FeatureSet> docs;
	for(auto const& e : c.examples)
		docs.push_back(e.features);
	FeatureIndex idx(docs);
	for(std::uint32_t f = 0; f < idx.feature_count(); ++f) {
		auto const& name = idx.name(f);
		EXPECT_GE(idx.doc_freq(f), 1u);
		EXPECT_LE(idx.doc_freq(f), idx.doc_count());
		EXPECT_EQ(idx.postings(name).size(), idx.doc_freq(f));
		if(f > 0) {
			EXPECT_LT(idx.name(f - 1), name);
		}
		for(auto d : idx.postings(name))
			EXPECT_TRUE(docs[d].contains(name));
	}
}

TEST(Similarity, HandCase)
{
	std::map<std::string, double, std::less<>> t{{"a", 1.0}, {"b", 4.0}, {"c", 1.0}};
	auto w = [&](std::string const& f) { return t.at(f); };
	EXPECT_NEAR(similarity(FeatureSet({"a", "b"}), FeatureSet({"b", "c"}), w), 2.0 / 3.0, 1e-12);
	EXPECT_EQ(similarity(FeatureSet({"a"}), FeatureSet({"c"}), w), 0.0);
	EXPECT_EQ(similarity(FeatureSet({"a", "b"}), FeatureSet({"a", "b"}), w), 1.0);
}

TEST(Similarity, ZeroDenominator)
{
	auto zero = [](std::string const&) { return 0.0; };
	EXPECT_EQ(similarity(FeatureSet({"a"}), FeatureSet({"a"}), zero), 0.0);
	EXPECT_EQ(similarity(FeatureSet{}, FeatureSet{}, zero), 0.0);
}

TEST(Similarity, Properties)
{
	Gen g(31);
	for(int round = 0; round < 2000; ++round) {
		std::map<std::string, double> t;
		for(int i = 0; i < 12; ++i)
			for(auto tag : {"T:f", "H:f"})
				t[tag + std::to_string(i)] = flip(g, 0.2) ? 0.0 : std::uniform_real_distribution<double>(0.0, 25.0)(g);
		auto w = [&](std::string const& f) { return t.at(f); };
		auto x = random_features(g, 12, 6);
		auto y = random_features(g, 12, 6);
		double const m = similarity(x, y, w);
		EXPECT_GE(m, 0.0);
		EXPECT_LE(m, 1.0);
		EXPECT_EQ(m, similarity(y, x, w));
		double const self = similarity(x, x, w);
		EXPECT_TRUE(self == 0.0 || self == 1.0);
		bool const positive = std::any_of(x.begin(), x.end(), [&](auto const& f) { return t.at(f) > 0.0; });
		EXPECT_EQ(self, positive ? 1.0 : 0.0);

		// a feature added to both sides never lowers the similarity
		auto const f = (flip(g) ? "T:f" : "H:f") + std::to_string(pick(g, 12));
		auto x2 = x, y2 = y;
		x2.insert(f);
		y2.insert(f);
		EXPECT_GE(similarity(x2, y2, w), m - 1e-12);
	}
}

TEST(Similarity, DisjointIsZeroWithIndex)
{
	Gen g(2);
	auto c = random_corpus(g, 30);
	KnnRanker knn(c, {});
	EXPECT_EQ(similarity(FeatureSet({"T:f1", "T:f2"}), FeatureSet({"T:f3"}), knn.index()), 0.0);
}

TEST(Knn, VotingByFrequency)
{
	Corpus c;
	c.examples.push_back(make_example("x", {"T:q", "T:u1"}, {"a", "b"}));
	c.examples.push_back(make_example("y", {"T:q", "T:u2"}, {"a"}));
	c.examples.push_back(make_example("z", {"T:q", "T:u3"}, {"c"}));
	c.examples.push_back(make_example("w", {"T:other"}, {"d"}));
	KnnRanker knn(c, {3, false});
	auto r = knn.rank(FeatureSet({"T:q", "T:u1", "T:u2", "T:u3"}));
	ASSERT_EQ(r.size(), 3u);
	EXPECT_EQ(r[0].premise, "a");
	EXPECT_EQ(r[0].score, 2.0);
	EXPECT_EQ(r[1].premise, "b");
	EXPECT_EQ(r[1].score, 1.0);
	EXPECT_EQ(r[2].premise, "c");
	EXPECT_EQ(r[2].score, 1.0);
}

TEST(Knn, SimilarityWeightedVoting)
{
	Corpus c;
	c.examples.push_back(make_example("x", {"T:a", "T:b"}, {"p"}));
	c.examples.push_back(make_example("y", {"T:a", "T:c"}, {"q"}));
	c.examples.push_back(make_example("z", {"T:d"}, {"r"}));
	KnnRanker knn(c, {2, true});
	FeatureSet query({"T:a", "T:b"});
	auto r = knn.rank(query);
	ASSERT_EQ(r.size(), 2u);
	EXPECT_EQ(r[0].premise, "p");
	EXPECT_DOUBLE_EQ(r[0].score, 1.0);
	EXPECT_EQ(r[1].premise, "q");
	EXPECT_DOUBLE_EQ(r[1].score, similarity(query, c.examples[1].features, knn.index()));
	EXPECT_LT(r[1].score, 1.0);
}

TEST(Knn, NearestIsItself)
{
	Gen g(12);
	auto c = random_corpus(g, 50);
	for(std::size_t i = 0; i < c.size(); ++i)
		c.examples[i].features.insert("T:unique" + std::to_string(i));
	KnnRanker knn(c, {1, false});
	for(auto const& e : c.examples) {
		auto r = knn.rank(e.features);
		ASSERT_EQ(r.size(), e.premises.size());
		for(std::size_t j = 0; j < r.size(); ++j)
			EXPECT_TRUE(e.premises.contains(r[j].premise));
	}
}

TEST(Knn, TieBreakByIndex)
{
	Corpus c;
	c.examples.push_back(make_example("x", {"T:a", "T:z"}, {"late"}));
	c.examples.push_back(make_example("y", {"T:a", "T:z"}, {"early"}));
	c.examples.push_back(make_example("w", {"T:b"}, {"other"}));
	KnnRanker knn(c, {1, false});
	auto n = knn.neighbours(FeatureSet({"T:a"}));
	ASSERT_EQ(n.size(), 1u);
	EXPECT_EQ(n[0].first, 0u);
}

TEST(Knn, Errors)
{
	EXPECT_THROW(KnnRanker({}, {0, false}, FeatureConfig::names()), KnnError);
	KnnRanker empty({}, {}, FeatureConfig::names());
	EXPECT_THROW(empty.rank(FeatureSet({"T:a"})), KnnError);
}

TEST(Knn, OracleEquivalence)
{
	Gen g(2024);
	for(int round = 0; round < 40; ++round) {
		auto const n = 1 + pick(g, 200);
		auto c = random_corpus(g, n, 5 + pick(g, 60), 3 + pick(g, 30));
		KnnConfig cfg{1 + pick(g, 2 * n), flip(g, 0.3)};
		KnnRanker knn(c, cfg);
		for(int q = 0; q < 10; ++q) {
			auto query = flip(g, 0.3) ? c.examples[pick(g, n)].features : random_features(g, 70, 10);
			EXPECT_EQ(knn.rank(query), oracle::knn_rank(c.examples, query, cfg.k, cfg.similarity_weighted));
		}
	}
}

TEST(Knn, Deterministic)
{
	Gen g(6);
	auto c = random_corpus(g, 100);
	KnnRanker a(c, {10, false}), b(c, {10, false});
	for(auto const& e : c.examples)
		EXPECT_EQ(a.rank(e.features), b.rank(e.features));
}

TEST(Knn, AddExampleMatchesRebuild)
{
	Gen g(19);
	auto c = random_corpus(g, 40);
	KnnRanker incremental(std::vector<Example>(c.examples.begin(), c.examples.end() - 5), {7, false},
		FeatureConfig::names());
	for(auto it = c.examples.end() - 5; it != c.examples.end(); ++it)
		incremental.add_example(*it);
	KnnRanker full(c.examples, {7, false}, FeatureConfig::names());
	for(auto const& e : c.examples)
		EXPECT_EQ(incremental.rank(e.features), full.rank(e.features));
}

TEST(Knn, SerializeRoundTrip)
{
	Gen g(44);
	auto c = random_corpus(g, 80);
	c.examples[3].module = "Mod";
	KnnRanker knn(c, {9, true});
	auto text = serialize(knn);
	std::vector<std::string> lines;
	std::string line;
	std::istringstream in(text);
	while(std::getline(in, line))
		lines.push_back(line);
	auto back = deserialize_knn(lines);
	EXPECT_EQ(back.config(), knn.config());
	EXPECT_EQ(back.feature_config(), knn.feature_config());
	EXPECT_EQ(back.examples(), knn.examples());
	EXPECT_EQ(serialize(back), text);
	for(auto const& e : c.examples)
		EXPECT_EQ(back.rank(e.features), knn.rank(e.features));

	lines[1] = "k x";
	EXPECT_THROW(deserialize_knn(lines), LoadError);
	EXPECT_THROW(deserialize_knn({"premsel-knn 2"}), LoadError);
}
