#pragma once

#include <premsel/premsel.hpp>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace premsel::test {

// div_ne_zero : a ≠ 0 → b ≠ 0 → a / b ≠ 0, with the instance chain the
// elaborator inserts around the literal 0.
inline constexpr char const* div_ne_zero_line =
	"THM div_ne_zero "
	"CONCL (Ne (HDiv.hDiv a b) (OfNat.ofNat 0 (Zero.toOfNat0 (MonoidWithZero.toZero inst)))) "
	"HYP (Ne a (OfNat.ofNat 0 (Zero.toOfNat0 (MonoidWithZero.toZero inst)))) "
	"HYP (Ne b (OfNat.ofNat 0 (Zero.toOfNat0 (MonoidWithZero.toZero inst))))";

inline constexpr char const* div_ne_zero_proof = "by rw [div_eq_mul_inv]; exact mul_ne_zero ha (inv_ne_zero hb)";

class TempDir {
public:
	TempDir()
	{
		static std::mt19937_64 rng(std::random_device{}());
		path_ = std::filesystem::temp_directory_path() / ("premsel-test-" + std::to_string(rng()));
		std::filesystem::create_directories(path_);
	}
	~TempDir() { std::filesystem::remove_all(path_); }
	TempDir(TempDir const&) = delete;
	TempDir& operator=(TempDir const&) = delete;

	std::string operator/(std::string const& name) const { return (path_ / name).string(); }
	std::filesystem::path const& path() const { return path_; }

private:
	std::filesystem::path path_;
};

using Gen = std::mt19937_64;

inline std::size_t pick(Gen& g, std::size_t n)
{
	return std::uniform_int_distribution<std::size_t>(0, n - 1)(g);
}

inline bool flip(Gen& g, double p = 0.5)
{
	return std::bernoulli_distribution(p)(g);
}

// Names drawn from a small alphabet so that repeats are common.
inline std::string random_name(Gen& g, std::size_t alphabet = 8)
{
	static char const* const pool[] = {"f", "g", "Ne", "0", "HAdd.hAdd", "x", "Nat.succ", "y'", "h_1", "List.map",
		"a", "b", "OfNat.ofNat", "Eq", "c", "z"};
	return pool[pick(g, std::min<std::size_t>(alphabet, std::size(pool)))];
}

inline Expr random_expr(Gen& g, int depth, std::size_t alphabet = 8)
{
	Expr e(random_name(g, alphabet));
	if(depth > 0) {
		auto const n = pick(g, 4);
		for(std::size_t i = 0; i < n; ++i)
			e.args.push_back(random_expr(g, depth - 1 - static_cast<int>(pick(g, 2)), alphabet));
	}
	return e;
}

inline Statement random_statement(Gen& g)
{
	Statement s;
	s.name = "thm" + std::to_string(pick(g, 1000));
	s.conclusion = random_expr(g, 3);
	auto const n = pick(g, 3);
	for(std::size_t i = 0; i < n; ++i)
		s.hypotheses.push_back(random_expr(g, 3));
	return s;
}

inline FeatureSet random_features(Gen& g, std::size_t universe, std::size_t max_size)
{
	std::vector<std::string> v;
	auto const n = 1 + pick(g, max_size);
	for(std::size_t i = 0; i < n; ++i)
		v.push_back((flip(g) ? "T:f" : "H:f") + std::to_string(pick(g, universe)));
	return FeatureSet(std::move(v));
}

inline NameSet random_premises(Gen& g, std::size_t universe, std::size_t max_size)
{
	std::vector<std::string> v;
	auto const n = 1 + pick(g, max_size);
	for(std::size_t i = 0; i < n; ++i)
		v.push_back("p" + std::to_string(pick(g, universe)));
	return NameSet(std::move(v));
}

inline Corpus random_corpus(Gen& g, std::size_t n, std::size_t n_features = 40, std::size_t n_premises = 20)
{
	Corpus c;
	for(std::size_t i = 0; i < n; ++i) {
		Example e;
		e.id = "t" + std::to_string(i);
		e.features = random_features(g, n_features, 8);
		e.premises = random_premises(g, n_premises, 4);
		c.examples.push_back(std::move(e));
	}
	c.register_modules();
	return c;
}

inline Example make_example(std::string id, std::vector<std::string> features, std::vector<std::string> premises)
{
	Example e;
	e.id = std::move(id);
	e.features = FeatureSet(std::move(features));
	e.premises = NameSet(std::move(premises));
	return e;
}

} // namespace premsel::test
