#include "support.hpp"

#include <gtest/gtest.h>

using namespace premsel;
using namespace premsel::test;

namespace {

Ranking ranking(std::vector<std::string> names)
{
	Ranking r;
	double s = static_cast<double>(names.size());
	for(auto& n : names)
		r.push_back({std::move(n), s--});
	return r;
}

std::vector<std::string> fillers(std::size_t n)
{
	std::vector<std::string> v;
	for(std::size_t i = 1; i <= n; ++i)
		v.push_back("x" + std::to_string(i));
	return v;
}

// Returns the used premises of each test example first.
struct OracleModel {
	std::map<std::string, NameSet> answers;
	FeatureConfig cfg = FeatureConfig::names();

	Ranking rank(FeatureSet const& fs) const
	{
		auto const& p = answers.at(*fs.begin());
		Ranking r;
		for(auto const& name : p)
			r.push_back({name, 1.0});
		r.push_back({"zzz_noise", 0.5});
		return r;
	}
	FeatureConfig feature_config() const { return cfg; }
};

struct EmptyModel {
	Ranking rank(FeatureSet const&) const { return {}; }
	FeatureConfig feature_config() const { return FeatureConfig::names(); }
};

Corpus test_corpus()
{
	Corpus c;
	c.examples.push_back(make_example("a", {"T:a"}, {"p", "q"}));
	c.examples.push_back(make_example("b", {"T:b"}, {"r"}));
	c.examples.push_back(make_example("c", {"T:c"}, {"p", "s", "t"}));
	return c;
}

} // namespace

TEST(Cover, Examples)
{
	EXPECT_EQ(cover(NameSet({"a", "b"}), ranking({"a", "b", "c"})), 1.0);
	EXPECT_EQ(cover(NameSet({"a", "b"}), ranking({"b", "x", "a"})), 0.5);
	EXPECT_EQ(cover(NameSet({"a"}), Ranking{}), 0.0);
	EXPECT_THROW(cover(NameSet{}, ranking({"a"})), EvalError);
	EXPECT_THROW(cover_plus(NameSet{}, ranking({"a"})), EvalError);
}

TEST(CoverPlus, WindowBoundary)
{
	auto r11 = fillers(10);
	r11.push_back("a");
	EXPECT_EQ(cover_plus(NameSet({"a"}), ranking(r11)), 1.0);
	EXPECT_EQ(cover(NameSet({"a"}), ranking(r11)), 0.0);
	auto r12 = fillers(11);
	r12.push_back("a");
	EXPECT_EQ(cover_plus(NameSet({"a"}), ranking(r12)), 0.0);

	// n = 2: positions n (2), n+10 (12) are inside, n+11 (13) is not.
	NameSet p({"a", "b"});
	auto at = [](std::size_t pos, std::string name) {
		auto v = fillers(20);
		v.insert(v.begin() + static_cast<std::ptrdiff_t>(pos - 1), std::move(name));
		return ranking(v);
	};
	EXPECT_EQ(cover(p, at(2, "a")), 0.5);
	EXPECT_EQ(cover(p, at(3, "a")), 0.0);
	EXPECT_EQ(cover_plus(p, at(12, "a")), 0.5);
	EXPECT_EQ(cover_plus(p, at(13, "a")), 0.0);
}

TEST(Cover, Properties)
{
	Gen g(1);
	for(int i = 0; i < 10000; ++i) {
		auto p = random_premises(g, 30, 8);
		std::vector<std::string> names;
		for(int j = 0; j < 30; ++j)
			if(flip(g))
				names.push_back("p" + std::to_string(j));
		std::shuffle(names.begin(), names.end(), g);
		auto r = ranking(names);
		double const c = cover(p, r), cp = cover_plus(p, r);
		ASSERT_GE(c, 0.0);
		ASSERT_LE(c, cp);
		ASSERT_LE(cp, 1.0);

		// appending beyond the window changes nothing
		auto longer = names;
		longer.push_back("p" + std::to_string(pick(g, 30) + 100));
		auto const n = p.size();
		if(names.size() >= n) {
			EXPECT_EQ(cover(p, ranking(longer)), c);
		}
		if(names.size() >= n + 10) {
			EXPECT_EQ(cover_plus(p, ranking(longer)), cp);
		}

		// permuting the head or the tail keeps cover
		auto perm = names;
		auto const cut = std::min(n, perm.size());
		std::shuffle(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cut), g);
		std::shuffle(perm.begin() + static_cast<std::ptrdiff_t>(cut), perm.end(), g);
		EXPECT_EQ(cover(p, ranking(perm)), c);
	}
}

TEST(Evaluate, OracleAndEmptyModels)
{
	auto test = test_corpus();
	OracleModel oracle;
	for(auto const& e : test.examples)
		oracle.answers[*e.features.begin()] = e.premises;
	auto r = evaluate(oracle, test, FeatureConfig::names());
	EXPECT_EQ(r.count(), 3u);
	EXPECT_EQ(r.mean_cover, 1.0);
	EXPECT_EQ(r.mean_cover_plus, 1.0);
	EXPECT_GE(r.mean_seconds, 0.0);

	auto empty = evaluate(EmptyModel{}, test, FeatureConfig::names());
	EXPECT_EQ(empty.mean_cover, 0.0);
	EXPECT_EQ(empty.mean_cover_plus, 0.0);
}

TEST(Evaluate, ArithmeticMeans)
{
	auto test = test_corpus();
	OracleModel m;
	m.answers["T:a"] = NameSet({"p"});
	m.answers["T:b"] = NameSet({"r"});
	m.answers["T:c"] = NameSet({"zz"});
	auto r = evaluate(m, test, FeatureConfig::names());
	EXPECT_EQ(r.examples[0].cover, 0.5);
	EXPECT_EQ(r.examples[1].cover, 1.0);
	EXPECT_EQ(r.examples[2].cover, 0.0);
	EXPECT_DOUBLE_EQ(r.mean_cover, 0.5);
	EXPECT_EQ(r.examples[2].n, 3u);
}

TEST(Evaluate, ConfigMismatch)
{
	auto test = test_corpus();
	EXPECT_THROW(evaluate(EmptyModel{}, test, FeatureConfig::names_bigrams()), EvalError);
	Corpus bigram_test;
	bigram_test.examples.push_back(make_example("a", {"T:a/b"}, {"p"}));
	EXPECT_THROW(evaluate(EmptyModel{}, bigram_test, FeatureConfig::names()), EvalError);
	EXPECT_THROW(evaluate(EmptyModel{}, Corpus{}, FeatureConfig::names()), EvalError);
}

TEST(Evaluate, DeterministicAndParallel)
{
	Gen g(2);
	auto train = random_corpus(g, 200);
	auto test = random_corpus(g, 50);
	KnnRanker knn(train, {10, false});
	auto a = evaluate(knn, test, knn.feature_config());
	auto b = evaluate(knn, test, knn.feature_config(), 4);
	EXPECT_EQ(b.parallelism, 4u);
	ASSERT_EQ(a.count(), b.count());
	for(std::size_t i = 0; i < a.count(); ++i) {
		EXPECT_EQ(a.examples[i].cover, b.examples[i].cover);
		EXPECT_EQ(a.examples[i].cover_plus, b.examples[i].cover_plus);
	}
	EXPECT_EQ(a.mean_cover, b.mean_cover);
}

TEST(Results, Jsonl)
{
	EvalResult r;
	r.examples.push_back({"a", 2, 0.5, 1.0, 0.25});
	aggregate(r);
	auto text = results_jsonl(r);
	auto nl = text.find('\n');
	auto first = nlohmann::json::parse(text.substr(0, nl));
	EXPECT_EQ(first["id"], "a");
	EXPECT_EQ(first["n"], 2);
	EXPECT_EQ(first["cover"], 0.5);
	EXPECT_EQ(first["cover_plus"], 1.0);
	EXPECT_EQ(first["prediction_seconds"], 0.25);
	auto agg = nlohmann::json::parse(text.substr(nl + 1));
	EXPECT_EQ(agg["aggregate"]["examples"], 1);
	EXPECT_EQ(agg["aggregate"]["mean_cover"], 0.5);
}

TEST(Report, Grid)
{
	std::vector<EvalResult> store(18);
	std::vector<LabeledResult> cells;
	std::size_t k = 0;
	for(auto row : {"all", "source", "math"})
		for(auto model : {"forest", "knn"})
			for(auto feats : {"n", "n+b", "n+b+t"}) {
				auto& r = store[k];
				r.examples.push_back({"x", 1, 0.1 * static_cast<double>(k % 7), 1.0, 0.0});
				aggregate(r);
				cells.push_back({row, std::string(model) + " " + feats, &store[k++]});
			}
	auto rep = report(cells);
	EXPECT_EQ(rep.json["rows"].size(), 3u);
	EXPECT_EQ(rep.json["columns"].size(), 6u);
	EXPECT_EQ(rep.json["cells"].size(), 18u);
	std::vector<std::string> lines;
	std::istringstream in(rep.text);
	for(std::string l; std::getline(in, l);)
		lines.push_back(l);
	ASSERT_EQ(lines.size(), 4u);
	EXPECT_EQ(lines[1].substr(0, 3), "all");
	EXPECT_EQ(lines[3].substr(0, 4), "math");
	// aligned: every line has the same length except trailing cell widths
	EXPECT_NE(lines[0].find("forest n+b+t"), std::string::npos);
	EXPECT_NE(rep.text.find("(1.000)"), std::string::npos);
	// one star per row
	for(std::size_t i = 1; i < lines.size(); ++i)
		EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), '*'), 1);
	EXPECT_EQ(report(cells).text, rep.text);
}

TEST(Report, TiesGoToFirstColumn)
{
	EvalResult r;
	r.examples.push_back({"x", 1, 0.5, 0.5, 0.0});
	aggregate(r);
	auto rep = report({{"all", "knn n", &r}, {"all", "forest n", &r}});
	EXPECT_NE(rep.text.find("*0.500 (0.500)  0.500 (0.500)"), std::string::npos) << rep.text;
	for(auto const& c : rep.json["cells"])
		EXPECT_EQ(c["best"], c["column"] == "forest n");

	auto single = report({{"all", "forest n", &r}});
	EXPECT_EQ(std::count(single.text.begin(), single.text.end(), '\n'), 2);
	EXPECT_THROW(report({}), EvalError);
}

TEST(Report, MissingCell)
{
	EvalResult r;
	r.examples.push_back({"x", 1, 0.5, 0.5, 0.0});
	aggregate(r);
	auto rep = report({{"all", "a", &r}, {"math", "b", &r}});
	EXPECT_NE(rep.text.find("-"), std::string::npos);
}
