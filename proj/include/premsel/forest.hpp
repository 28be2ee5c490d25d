#pragma once

#include <premsel/dataset.hpp>
#include <premsel/ranking.hpp>
#include <premsel/string_set.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

namespace premsel {

struct ForestConfig {
	std::size_t n_trees = 300;
	// Probability that a tree is updated with a given example, per pass.
	double example_sampling_prob = 0.3;
	std::size_t n_passes = 3;
	// A leaf holding at least this many examples (with at least two distinct
	// feature sets) is split.
	std::size_t leaf_split_threshold = 16;
	std::size_t n_candidate_features = 32;
	std::uint64_t rng_seed = 42;
	bool shuffle_passes = true;

	void validate() const
	{
		if(n_trees < 1)
			throw Error("forest: n_trees must be at least 1");
		if(!(example_sampling_prob >= 0.0 && example_sampling_prob <= 1.0))
			throw Error("forest: example_sampling_prob must be in [0, 1]");
		if(n_passes < 1)
			throw Error("forest: n_passes must be at least 1");
		if(leaf_split_threshold < 2)
			throw Error("forest: leaf_split_threshold must be at least 2");
		if(n_candidate_features < 1)
			throw Error("forest: n_candidate_features must be at least 1");
	}

	friend bool operator==(ForestConfig const&, ForestConfig const&) = default;
};

// ---------------------------------------------------------------------------
// Random streams. Only the engine (whose output sequence is fixed by the
// standard) is taken from <random>; the derived draws are spelled out so
// model files reproduce across standard libraries.

using Rng = std::mt19937_64;

inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream)
{
	std::seed_seq seq{
		static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
		static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
	return Rng(seq);
}

// Uniform in [0, n), n > 0 (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
	unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
	auto low = static_cast<std::uint64_t>(m);
	if(low < n) {
		std::uint64_t const threshold = (0 - n) % n;
		while(low < threshold) {
			m = static_cast<unsigned __int128>(rng()) * n;
			low = static_cast<std::uint64_t>(m);
		}
	}
	return static_cast<std::uint64_t>(m >> 64);
}

inline double uniform01(Rng& rng)
{
	return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Always consumes exactly one draw.
inline bool coin(Rng& rng, double p)
{
	return uniform01(rng) < p;
}

template<typename T>
void shuffle(std::vector<T>& v, Rng& rng)
{
	for(std::size_t i = v.size(); i > 1; --i)
		std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

// ---------------------------------------------------------------------------

class Interner {
public:
	std::uint32_t intern(std::string_view s)
	{
		if(auto it = ids_.find(s); it != ids_.end())
			return it->second;
		auto const id = static_cast<std::uint32_t>(names_.size());
		names_.emplace_back(s);
		ids_.emplace(names_.back(), id);
		return id;
	}

	std::optional<std::uint32_t> find(std::string_view s) const
	{
		auto it = ids_.find(s);
		if(it == ids_.end())
			return std::nullopt;
		return it->second;
	}

	std::string const& name(std::uint32_t id) const { return names_[id]; }
	std::size_t size() const noexcept { return names_.size(); }

private:
	std::vector<std::string> names_;
	std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> ids_;
};

struct SplitRule {
	std::string feature;

	bool operator()(FeatureSet const& fs) const { return fs.contains(feature); }

	friend bool operator==(SplitRule const&, SplitRule const&) = default;
};

struct TreeNode {
	static constexpr std::uint32_t no_feature = std::numeric_limits<std::uint32_t>::max();

	// Split feature id, or no_feature for a leaf. Examples having the
	// feature go right.
	std::uint32_t feature = no_feature;
	std::uint32_t left = 0;
	std::uint32_t right = 0;

	bool is_leaf() const noexcept { return feature == no_feature; }

	friend bool operator==(TreeNode const&, TreeNode const&) = default;
};

/// One decision tree; node 0 is the root. A fresh tree is a single empty leaf.
/// Leaf payloads live beside the nodes, so routing only walks small nodes.
struct Tree {
	std::vector<TreeNode> nodes{TreeNode{}};
	// examples[i]: indices into the forest's example store, empty unless node i is a leaf
	std::vector<std::vector<std::uint32_t>> examples{{}};
	Rng rng;

	std::size_t leaf_count() const
	{
		return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](auto const& n) { return n.is_leaf(); }));
	}

	std::size_t depth() const
	{
		std::size_t best = 0;
		auto walk = [&](auto&& self, std::uint32_t i, std::size_t d) -> void {
			best = std::max(best, d);
			if(!nodes[i].is_leaf()) {
				self(self, nodes[i].left, d + 1);
				self(self, nodes[i].right, d + 1);
			}
		};
		walk(walk, 0, 0);
		return best;
	}

	bool empty() const noexcept { return nodes.size() == 1 && examples[0].empty(); }
};

/// Index of the leaf reached by descending right exactly when `has(feature)`.
template<typename Has>
std::uint32_t route(Tree const& t, Has&& has)
{
	std::uint32_t i = 0;
	while(!t.nodes[i].is_leaf())
		i = has(t.nodes[i].feature) ? t.nodes[i].right : t.nodes[i].left;
	return i;
}

namespace detail {

// Size-weighted Gini impurity of a two-way partition, where each side's label
// distribution is the multiset of premise ids of its examples.
inline double weighted_gini(std::vector<std::uint32_t>& left, std::size_t n_left,
	std::vector<std::uint32_t>& right, std::size_t n_right)
{
	auto gini = [](std::vector<std::uint32_t>& labels) {
		if(labels.empty())
			return 0.0;
		std::sort(labels.begin(), labels.end());
		double const total = static_cast<double>(labels.size());
		double sum_sq = 0.0;
		for(std::size_t i = 0; i < labels.size();) {
			std::size_t j = i;
			while(j < labels.size() && labels[j] == labels[i])
				++j;
			double const p = static_cast<double>(j - i) / total;
			sum_sq += p * p;
			i = j;
		}
		return 1.0 - sum_sq;
	};
	double const n = static_cast<double>(n_left + n_right);
	return static_cast<double>(n_left) / n * gini(left) + static_cast<double>(n_right) / n * gini(right);
}

/// Picks a split feature for the examples `leaf`. `features(i)` and
/// `premises(i)` give sorted id spans of example i; `name(f)` the string of
/// feature id f. Candidates are features present in some but not all
/// examples, sampled uniformly without replacement, and scored by weighted
/// Gini impurity; ties go to the lexicographically smallest feature.
template<typename FeaturesOf, typename PremisesOf, typename NameOf>
std::optional<std::uint32_t> choose_split(std::span<std::uint32_t const> leaf, FeaturesOf&& features,
	PremisesOf&& premises, NameOf&& name, std::size_t n_candidates, Rng& rng)
{
	if(leaf.size() < 2)
		return std::nullopt;

	std::vector<std::uint32_t> all;
	for(auto i : leaf) {
		auto fs = features(i);
		all.insert(all.end(), fs.begin(), fs.end());
	}
	std::sort(all.begin(), all.end());
	std::vector<std::uint32_t> separating;
	for(std::size_t i = 0; i < all.size();) {
		std::size_t j = i;
		while(j < all.size() && all[j] == all[i])
			++j;
		if(j - i < leaf.size())
			separating.push_back(all[i]);
		i = j;
	}
	if(separating.empty())
		return std::nullopt;

	auto by_name = [&](std::uint32_t a, std::uint32_t b) { return name(a) < name(b); };
	std::sort(separating.begin(), separating.end(), by_name);
	std::size_t const m = std::min(n_candidates, separating.size());
	for(std::size_t i = 0; i < m; ++i)
		std::swap(separating[i], separating[i + uniform_below(rng, separating.size() - i)]);
	separating.resize(m);
	std::sort(separating.begin(), separating.end(), by_name);

	std::optional<std::uint32_t> best;
	double best_score = std::numeric_limits<double>::infinity();
	std::vector<std::uint32_t> left, right;
	for(auto f : separating) {
		left.clear();
		right.clear();
		std::size_t n_left = 0, n_right = 0;
		for(auto i : leaf) {
			auto fs = features(i);
			auto ps = premises(i);
			if(std::binary_search(fs.begin(), fs.end(), f)) {
				right.insert(right.end(), ps.begin(), ps.end());
				++n_right;
			} else {
				left.insert(left.end(), ps.begin(), ps.end());
				++n_left;
			}
		}
		double const score = weighted_gini(left, n_left, right, n_right);
		if(score < best_score) {
			best_score = score;
			best = f;
		}
	}
	return best;
}

} // namespace detail

/// Split rule for a list of examples, or nothing when no feature separates
/// them.
inline std::optional<SplitRule> make_split_rule(std::span<Example const> examples, ForestConfig const& cfg, Rng& rng)
{
	Interner feats, prems;
	std::vector<std::vector<std::uint32_t>> fids, pids;
	for(auto const& e : examples) {
		auto& f = fids.emplace_back();
		for(auto const& s : e.features)
			f.push_back(feats.intern(s));
		std::sort(f.begin(), f.end());
		auto& p = pids.emplace_back();
		for(auto const& s : e.premises)
			p.push_back(prems.intern(s));
		std::sort(p.begin(), p.end());
	}
	std::vector<std::uint32_t> leaf(examples.size());
	for(std::uint32_t i = 0; i < leaf.size(); ++i)
		leaf[i] = i;
	auto chosen = detail::choose_split(
		leaf, [&](std::uint32_t i) { return std::span<std::uint32_t const>(fids[i]); },
		[&](std::uint32_t i) { return std::span<std::uint32_t const>(pids[i]); },
		[&](std::uint32_t f) -> std::string const& { return feats.name(f); }, cfg.n_candidate_features, rng);
	if(!chosen)
		return std::nullopt;
	return SplitRule{feats.name(*chosen)};
}

class ForestError : public Error {
public:
	using Error::Error;
};

/// Online random forest over sparse binary features with premise-set leaves.
class Forest {
public:
	explicit Forest(ForestConfig cfg = {})
		: cfg_(cfg)
	{
		cfg_.validate();
		rng_ = derive_rng(cfg_.rng_seed, 0);
		trees_.resize(cfg_.n_trees);
		for(std::size_t t = 0; t < trees_.size(); ++t)
			trees_[t].rng = derive_rng(cfg_.rng_seed, t + 1);
	}

	ForestConfig const& config() const noexcept { return cfg_; }
	FeatureConfig const& feature_config() const noexcept { return features_; }
	std::size_t tree_count() const noexcept { return trees_.size(); }
	Tree const& tree(std::size_t t) const { return trees_[t]; }
	std::size_t example_count() const noexcept { return examples_.size(); }
	Example const& example(std::uint32_t i) const { return examples_[i]; }

	/// Runs `n_passes` passes over `train`, offering every example to every
	/// tree with probability `example_sampling_prob`. Trees are independent,
	/// so they are processed on up to `threads` threads without affecting
	/// the result.
	void train(Corpus const& train, unsigned threads = 1)
	{
		if(train.empty())
			throw ForestError("forest: empty training corpus");
		auto const base = static_cast<std::uint32_t>(examples_.size());
		for(auto const& e : train.examples)
			store(e);
		std::vector<std::uint32_t> order(train.size());
		for(std::uint32_t i = 0; i < order.size(); ++i)
			order[i] = base + i;

		for(std::size_t pass = 0; pass < cfg_.n_passes; ++pass) {
			if(cfg_.shuffle_passes)
				shuffle(order, rng_);
			auto work = [&](std::size_t first, std::size_t stride) {
				for(std::size_t t = first; t < trees_.size(); t += stride)
					for(auto i : order)
						offer(t, i);
			};
			std::size_t const n_threads = std::clamp<std::size_t>(threads, 1, trees_.size());
			if(n_threads == 1) {
				work(0, 1);
			} else {
				std::vector<std::jthread> pool;
				for(std::size_t w = 0; w < n_threads; ++w)
					pool.emplace_back(work, w, n_threads);
			}
		}
	}

	/// Online update: stores `e` and offers it once to every tree.
	void update(Example e)
	{
		auto const i = store(std::move(e));
		for(std::size_t t = 0; t < trees_.size(); ++t)
			offer(t, i);
	}

	/// Inserts stored example `i` into tree `t` unconditionally: append to
	/// the routed leaf, then split the leaf if it qualifies.
	void add_example_to_tree(std::size_t t, std::uint32_t i)
	{
		Tree& tree = trees_[t];
		auto const& fs = stored_[i].features;
		auto const leaf = premsel::route(tree, [&](std::uint32_t f) { return std::binary_search(fs.begin(), fs.end(), f); });
		tree.examples[leaf].push_back(i);
		if(!should_split(tree.examples[leaf]))
			return;

		auto rule = detail::choose_split(
			tree.examples[leaf], [&](std::uint32_t j) { return std::span<std::uint32_t const>(stored_[j].features); },
			[&](std::uint32_t j) { return std::span<std::uint32_t const>(stored_[j].premises); },
			[&](std::uint32_t f) -> std::string const& { return feature_ids_.name(f); }, cfg_.n_candidate_features,
			tree.rng);
		if(!rule)
			return;

		std::vector<std::uint32_t> l, r;
		for(auto j : tree.examples[leaf]) {
			auto const& jf = stored_[j].features;
			(std::binary_search(jf.begin(), jf.end(), *rule) ? r : l).push_back(j);
		}
		auto const li = static_cast<std::uint32_t>(tree.nodes.size());
		tree.nodes.resize(li + 2);
		tree.examples.push_back(std::move(l));
		tree.examples.push_back(std::move(r));
		tree.examples[leaf] = {};
		auto& node = tree.nodes[leaf];
		node.feature = *rule;
		node.left = li;
		node.right = li + 1;
	}

	/// Stored examples in the leaf of tree `t` reached by `fs`.
	std::span<std::uint32_t const> route(std::size_t t, FeatureSet const& fs) const
	{
		auto q = query_ids(fs);
		auto const leaf = premsel::route(trees_[t], [&](std::uint32_t f) { return std::binary_search(q.begin(), q.end(), f); });
		return trees_[t].examples[leaf];
	}

	std::string const& feature_name(std::uint32_t id) const { return feature_ids_.name(id); }

	/// Each tree votes for premise p with the fraction of its reached leaf's
	/// examples that use p; votes are summed over trees.
	Ranking rank(FeatureSet const& query) const
	{
		if(std::all_of(trees_.begin(), trees_.end(), [](Tree const& t) { return t.empty(); }))
			throw ForestError("forest: every tree is empty");

		// Long left spines are common on sparse data, so membership is a mask
		// lookup rather than a search.
		std::vector<char> mask(feature_ids_.size(), 0);
		for(auto f : query_ids(query))
			mask[f] = 1;
		auto has = [&](std::uint32_t f) { return mask[f] != 0; };
		std::vector<double> score(premise_ids_.size(), 0.0);
		std::vector<std::uint32_t> touched, labels;
		for(auto const& tree : trees_) {
			auto const& leaf = tree.examples[premsel::route(tree, has)];
			if(leaf.empty())
				continue;
			labels.clear();
			for(auto i : leaf)
				labels.insert(labels.end(), stored_[i].premises.begin(), stored_[i].premises.end());
			std::sort(labels.begin(), labels.end());
			double const size = static_cast<double>(leaf.size());
			for(std::size_t a = 0; a < labels.size();) {
				std::size_t b = a;
				while(b < labels.size() && labels[b] == labels[a])
					++b;
				if(score[labels[a]] == 0.0)
					touched.push_back(labels[a]);
				score[labels[a]] += static_cast<double>(b - a) / size;
				a = b;
			}
		}
		Ranking r;
		r.reserve(touched.size());
		for(auto p : touched)
			r.push_back({premise_ids_.name(p), score[p]});
		std::sort(r.begin(), r.end(), ranks_before);
		return r;
	}

	friend std::string serialize(Forest const& f);
	friend Forest deserialize_forest(std::vector<std::string> const& lines);

private:
	struct Stored {
		std::vector<std::uint32_t> features; // ascending ids
		std::vector<std::uint32_t> premises; // ascending ids
	};

	std::uint32_t store(Example e)
	{
		Stored s;
		for(auto const& f : e.features)
			s.features.push_back(feature_ids_.intern(f));
		std::sort(s.features.begin(), s.features.end());
		for(auto const& p : e.premises)
			s.premises.push_back(premise_ids_.intern(p));
		std::sort(s.premises.begin(), s.premises.end());
		note_feature_classes(features_, e.features);
		stored_.push_back(std::move(s));
		examples_.push_back(std::move(e));
		return static_cast<std::uint32_t>(examples_.size() - 1);
	}

	void offer(std::size_t t, std::uint32_t i)
	{
		if(coin(trees_[t].rng, cfg_.example_sampling_prob))
			add_example_to_tree(t, i);
	}

	bool should_split(std::vector<std::uint32_t> const& leaf) const
	{
		if(leaf.size() < cfg_.leaf_split_threshold)
			return false;
		auto const& first = stored_[leaf.front()].features;
		return std::any_of(leaf.begin() + 1, leaf.end(), [&](std::uint32_t j) { return stored_[j].features != first; });
	}

	std::vector<std::uint32_t> query_ids(FeatureSet const& fs) const
	{
		std::vector<std::uint32_t> q;
		q.reserve(fs.size());
		for(auto const& f : fs)
			if(auto id = feature_ids_.find(f))
				q.push_back(*id);
		std::sort(q.begin(), q.end());
		return q;
	}

	ForestConfig cfg_;
	FeatureConfig features_{false, false, false};
	Rng rng_;
	std::vector<Tree> trees_;
	std::vector<Example> examples_;
	std::vector<Stored> stored_;
	Interner feature_ids_;
	Interner premise_ids_;
};

inline Forest train_forest(Corpus const& train, ForestConfig const& cfg, unsigned threads = 1)
{
	Forest f(cfg);
	f.train(train, threads);
	return f;
}

inline void update_forest(Forest& f, Example e)
{
	f.update(std::move(e));
}

inline Ranking forest_predict(Forest const& f, FeatureSet const& query)
{
	return f.rank(query);
}

// ---------------------------------------------------------------------------
// Model file
//
//   premsel-forest 1
//   trees <n> / sample_p <p> / passes <n> / leaf_split_threshold <n>
//   candidate_features <n> / seed <n> / shuffle <0|1> / features <cfg>
//   examples <count>
//   <labels line>\t<features line>          (count times)
//   forest_rng <engine state>
//   tree <index> <node count>               (per tree)
//   rng <engine state>
//   L <k> <example index>...  |  N <feature> <left> <right>   (per node)

inline constexpr std::string_view forest_magic = "premsel-forest";

namespace detail {

inline std::string format_double(double v)
{
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

} // namespace detail

inline std::string serialize(Forest const& f)
{
	std::ostringstream out;
	auto const& c = f.cfg_;
	out << forest_magic << " 1\n";
	out << "trees " << c.n_trees << '\n';
	out << "sample_p " << detail::format_double(c.example_sampling_prob) << '\n';
	out << "passes " << c.n_passes << '\n';
	out << "leaf_split_threshold " << c.leaf_split_threshold << '\n';
	out << "candidate_features " << c.n_candidate_features << '\n';
	out << "seed " << c.rng_seed << '\n';
	out << "shuffle " << (c.shuffle_passes ? 1 : 0) << '\n';
	out << "features " << to_string(f.features_) << '\n';
	out << "examples " << f.examples_.size() << '\n';
	for(auto const& e : f.examples_)
		out << format_labels_line(e) << '\t' << format_features_line(e.features) << '\n';
	out << "forest_rng " << f.rng_ << '\n';
	for(std::size_t t = 0; t < f.trees_.size(); ++t) {
		auto const& tree = f.trees_[t];
		out << "tree " << t << ' ' << tree.nodes.size() << '\n';
		out << "rng " << tree.rng << '\n';
		for(std::size_t k = 0; k < tree.nodes.size(); ++k) {
			auto const& n = tree.nodes[k];
			if(n.is_leaf()) {
				out << "L " << tree.examples[k].size();
				for(auto i : tree.examples[k])
					out << ' ' << i;
			} else {
				out << "N " << f.feature_ids_.name(n.feature) << ' ' << n.left << ' ' << n.right;
			}
			out << '\n';
		}
	}
	return out.str();
}

inline Forest deserialize_forest(std::vector<std::string> const& lines)
{
	std::size_t pos = 0;
	// `pos` is the 1-based number of the line consumed last.
	auto fail = [&](std::string const& what) { return LoadError("forest model", pos, what); };
	auto next = [&]() -> std::string const& {
		if(pos >= lines.size())
			throw LoadError("forest model", lines.size(), "truncated model");
		return lines[pos++];
	};
	auto field = [&](std::string_view key) {
		auto toks = split_ws(next());
		if(toks.size() != 2 || toks[0] != key)
			throw fail("expected '" + std::string(key) + " <value>'");
		return toks[1];
	};
	auto number = [&](std::string const& s) {
		std::uint64_t v = 0;
		auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
		if(ec != std::errc() || p != s.data() + s.size())
			throw fail("malformed number '" + s + "'");
		return v;
	};

	if(next() != std::string(forest_magic) + " 1")
		throw LoadError("forest model", 1, "not a version-1 forest model file");

	ForestConfig c;
	c.n_trees = number(field("trees"));
	{
		auto s = field("sample_p");
		auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), c.example_sampling_prob);
		if(ec != std::errc() || p != s.data() + s.size())
			throw fail("malformed probability '" + s + "'");
	}
	c.n_passes = number(field("passes"));
	c.leaf_split_threshold = number(field("leaf_split_threshold"));
	c.n_candidate_features = number(field("candidate_features"));
	c.rng_seed = number(field("seed"));
	c.shuffle_passes = field("shuffle") == "1";
	auto features = field("features");

	Forest f(c);
	std::size_t const count = number(field("examples"));
	std::vector<std::string> labels, feats;
	for(std::size_t i = 0; i < count; ++i) {
		auto const& l = next();
		auto tab = l.find('\t');
		if(tab == std::string::npos)
			throw fail("expected '<labels>\\t<features>'");
		labels.push_back(l.substr(0, tab));
		feats.push_back(l.substr(tab + 1));
	}
	if(count > 0) {
		for(auto& e : parse_corpus(feats, labels).examples)
			f.store(std::move(e));
	}
	f.features_ = features.empty() ? FeatureConfig{false, false, false} : parse_feature_config(features);

	auto read_rng = [&](std::string_view key, Rng& rng) {
		auto const& l = next();
		if(l.compare(0, key.size() + 1, std::string(key) + ' ') != 0)
			throw fail("expected '" + std::string(key) + " <state>'");
		std::istringstream in(l.substr(key.size() + 1));
		in >> rng;
		if(!in)
			throw fail("malformed generator state");
	};
	read_rng("forest_rng", f.rng_);

	for(std::size_t t = 0; t < c.n_trees; ++t) {
		auto head = split_ws(next());
		if(head.size() != 3 || head[0] != "tree" || number(head[1]) != t)
			throw fail("expected 'tree " + std::to_string(t) + " <nodes>'");
		std::size_t const n_nodes = number(head[2]);
		if(n_nodes == 0)
			throw fail("tree without nodes");
		Tree& tree = f.trees_[t];
		read_rng("rng", tree.rng);
		tree.nodes.assign(n_nodes, TreeNode{});
		tree.examples.assign(n_nodes, {});
		for(std::size_t k = 0; k < n_nodes; ++k) {
			auto toks = split_ws(next());
			auto& node = tree.nodes[k];
			if(toks.size() >= 2 && toks[0] == "L") {
				std::size_t const m = number(toks[1]);
				if(toks.size() != m + 2)
					throw fail("leaf example count mismatch");
				for(std::size_t j = 0; j < m; ++j) {
					auto const idx = number(toks[j + 2]);
					if(idx >= count)
						throw fail("example index out of range");
					tree.examples[k].push_back(static_cast<std::uint32_t>(idx));
				}
			} else if(toks.size() == 4 && toks[0] == "N") {
				auto id = f.feature_ids_.find(toks[1]);
				if(!id)
					throw fail("split feature '" + toks[1] + "' not present in any stored example");
				node.feature = *id;
				node.left = static_cast<std::uint32_t>(number(toks[2]));
				node.right = static_cast<std::uint32_t>(number(toks[3]));
				if(node.left >= n_nodes || node.right >= n_nodes || node.left <= k || node.right <= k)
					throw fail("child index out of range");
			} else {
				throw fail("expected 'L ...' or 'N ...' node");
			}
		}
	}
	return f;
}

} // namespace premsel
