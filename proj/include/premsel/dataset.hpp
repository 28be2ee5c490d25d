#pragma once

#include <premsel/features.hpp>
#include <premsel/io.hpp>
#include <premsel/string_set.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace premsel {

inline constexpr std::string_view root_module = "_root";

struct Example {
	std::string id;
	FeatureSet features;
	NameSet premises;
	std::string module = std::string(root_module);

	friend bool operator==(Example const&, Example const&) = default;
};

struct Corpus {
	std::vector<Example> examples;
	// module -> direct dependencies
	std::map<std::string, std::vector<std::string>> modules;

	std::size_t size() const noexcept { return examples.size(); }
	bool empty() const noexcept { return examples.empty(); }

	// Feature classes present in the examples.
	FeatureConfig feature_config() const
	{
		FeatureConfig cfg{false, false, false};
		for(auto const& e : examples)
			note_feature_classes(cfg, e.features);
		return cfg;
	}

	// Registers the module of every example (and every named dependency) in
	// the dependency map.
	void register_modules()
	{
		for(auto const& e : examples)
			modules.try_emplace(e.module);
		std::vector<std::string> deps;
		for(auto const& [m, ds] : modules)
			deps.insert(deps.end(), ds.begin(), ds.end());
		for(auto const& d : deps)
			modules.try_emplace(d);
	}
};

// ---------------------------------------------------------------------------
// Premise filters

enum class FilterKind { all, source, math };

inline std::string_view to_string(FilterKind k) noexcept
{
	switch(k) {
	case FilterKind::all: return "all";
	case FilterKind::source: return "source";
	case FilterKind::math: return "math";
	}
	return "?";
}

inline FilterKind parse_filter_kind(std::string_view s)
{
	if(s == "all") return FilterKind::all;
	if(s == "source") return FilterKind::source;
	if(s == "math") return FilterKind::math;
	throw Error("unknown filter kind '" + std::string(s) + "' (expected all, source or math)");
}

struct FilterContext {
	NameSet math_whitelist;
	std::unordered_map<std::string, std::string> source_texts;
};

namespace detail {

inline bool is_ident_char(char c) noexcept
{
	auto u = static_cast<unsigned char>(c);
	return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') || u == '_'
		|| u == '.' || u == '\'' || u == '!' || u == '?' || u >= 0x80;
}

} // namespace detail

/// Maximal identifier tokens of a proof source string. Identifier characters
/// are ASCII alphanumerics, `_ . ' ! ?` and any non-ASCII byte.
inline std::unordered_set<std::string> identifier_tokens(std::string_view src)
{
	std::unordered_set<std::string> out;
	std::size_t i = 0;
	while(i < src.size()) {
		while(i < src.size() && !detail::is_ident_char(src[i]))
			++i;
		std::size_t const start = i;
		while(i < src.size() && detail::is_ident_char(src[i]))
			++i;
		if(i > start)
			out.emplace(src.substr(start, i - start));
	}
	return out;
}

/// True when some dot-separated component of `name` starts with `_`
/// (auxiliary names generated by Lean, e.g. `Foo._auxLemma.1`).
inline bool is_generated_name(std::string_view name) noexcept
{
	std::size_t start = 0;
	for(;;) {
		if(start < name.size() && name[start] == '_')
			return true;
		auto dot = name.find('.', start);
		if(dot == std::string_view::npos)
			return false;
		start = dot + 1;
	}
}

inline NameSet filter_premises(NameSet const& raw, FilterKind kind, FilterContext const& ctx,
	std::string_view id)
{
	std::vector<std::string> kept;
	switch(kind) {
	case FilterKind::all:
		for(auto const& p : raw)
			if(!is_generated_name(p))
				kept.push_back(p);
		break;
	case FilterKind::source: {
		auto it = ctx.source_texts.find(std::string(id));
		if(it == ctx.source_texts.end())
			throw Error("source filter: no proof source for theorem '" + std::string(id) + "'");
		auto tokens = identifier_tokens(it->second);
		for(auto const& p : raw)
			if(tokens.count(p))
				kept.push_back(p);
		break;
	}
	case FilterKind::math:
		if(ctx.math_whitelist.empty())
			throw Error("math filter: empty whitelist");
		for(auto const& p : raw)
			if(ctx.math_whitelist.contains(p))
				kept.push_back(p);
		break;
	}
	return NameSet(std::move(kept));
}

/// Filters every example; examples left without premises are dropped.
inline Corpus apply_filter(Corpus const& c, FilterKind kind, FilterContext const& ctx)
{
	Corpus out;
	out.modules = c.modules;
	for(auto const& e : c.examples) {
		auto kept = filter_premises(e.premises, kind, ctx, e.id);
		if(kept.empty())
			continue;
		Example f = e;
		f.premises = std::move(kept);
		out.examples.push_back(std::move(f));
	}
	return out;
}

// ---------------------------------------------------------------------------
// Train/test split

/// Returns one dependency cycle as a module path whose first and last
/// entries coincide, or nothing when the graph is acyclic.
inline std::optional<std::vector<std::string>> find_cycle(
	std::map<std::string, std::vector<std::string>> const& modules)
{
	enum class Mark { unseen, active, done };
	std::map<std::string, Mark> mark;
	std::vector<std::string> stack;
	std::optional<std::vector<std::string>> cycle;

	auto visit = [&](auto&& self, std::string const& m) -> bool {
		auto& mk = mark[m];
		if(mk == Mark::done)
			return false;
		if(mk == Mark::active) {
			auto it = std::find(stack.begin(), stack.end(), m);
			cycle.emplace(it, stack.end());
			cycle->push_back(m);
			return true;
		}
		mk = Mark::active;
		stack.push_back(m);
		if(auto deps = modules.find(m); deps != modules.end())
			for(auto const& d : deps->second)
				if(self(self, d))
					return true;
		stack.pop_back();
		mark[m] = Mark::done;
		return false;
	};

	for(auto const& [m, deps] : modules)
		if(visit(visit, m))
			return cycle;
	return std::nullopt;
}

/// Modules that are not a (transitive) dependency of any other module.
inline std::set<std::string> leaf_modules(std::map<std::string, std::vector<std::string>> const& modules)
{
	// Anything reachable through one or more edges is in particular the
	// target of some edge, so the direct targets are exactly the
	// transitive dependencies.
	std::set<std::string> depended_on;
	for(auto const& [m, deps] : modules)
		depended_on.insert(deps.begin(), deps.end());
	std::set<std::string> leaves;
	for(auto const& [m, deps] : modules)
		if(!depended_on.count(m))
			leaves.insert(m);
	return leaves;
}

struct CorpusSplit {
	Corpus train;
	Corpus test;
};

/// Test examples come from leaf modules; everything else is training data.
inline CorpusSplit split_corpus(Corpus c)
{
	c.register_modules();
	if(auto cycle = find_cycle(c.modules)) {
		std::string path;
		for(auto const& m : *cycle)
			path += (path.empty() ? "" : " -> ") + m;
		throw Error("module dependency cycle: " + path);
	}
	auto leaves = leaf_modules(c.modules);
	CorpusSplit s;
	s.train.modules = c.modules;
	s.test.modules = c.modules;
	for(auto& e : c.examples)
		(leaves.count(e.module) ? s.test : s.train).examples.push_back(std::move(e));
	return s;
}

// ---------------------------------------------------------------------------
// Statistics

struct CorpusStats {
	std::size_t total_premises = 0;
	std::size_t total_examples = 0;
	double premises_per_example = 0.0;

	friend bool operator==(CorpusStats const&, CorpusStats const&) = default;
};

// `total_premises` counts distinct premise names.
inline CorpusStats corpus_stats(Corpus const& c)
{
	CorpusStats s;
	if(c.empty())
		return s;
	std::unordered_set<std::string_view> distinct;
	std::size_t occurrences = 0;
	for(auto const& e : c.examples) {
		occurrences += e.premises.size();
		for(auto const& p : e.premises)
			distinct.insert(p);
	}
	s.total_premises = distinct.size();
	s.total_examples = c.size();
	s.premises_per_example = static_cast<double>(occurrences) / static_cast<double>(c.size());
	return s;
}

// ---------------------------------------------------------------------------
// On-disk format
//
//   *.features  one example per line, space-separated feature strings
//   *.labels    `<id> <premise> ...`; `<id>` may be `<module>/<name>`
//   *.deps      `<module>: <dep> <dep> ...`

class LoadError : public Error {
public:
	LoadError(std::string const& file, std::size_t line, std::string const& what)
		: Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what)
		, line_(line)
	{}

	// 1-based; 0 when the error is not tied to a line.
	std::size_t line() const noexcept { return line_; }

private:
	std::size_t line_;
};

inline std::string labels_id_token(Example const& e)
{
	if(e.module == root_module)
		return e.id;
	return e.module + '/' + e.id;
}

inline std::pair<std::string, std::string> split_labels_id(std::string_view token)
{
	auto slash = token.find('/');
	if(slash == std::string_view::npos)
		return {std::string(root_module), std::string(token)};
	return {std::string(token.substr(0, slash)), std::string(token.substr(slash + 1))};
}

inline std::map<std::string, std::vector<std::string>> parse_deps(
	std::vector<std::string> const& lines, std::string const& file = "deps")
{
	std::map<std::string, std::vector<std::string>> out;
	for(std::size_t i = 0; i < lines.size(); ++i) {
		std::string_view l = lines[i];
		auto first = l.find_first_not_of(" \t");
		if(first == std::string_view::npos || l[first] == '#')
			continue;
		auto colon = l.find(':');
		if(colon == std::string_view::npos)
			throw LoadError(file, i + 1, "expected '<module>: <deps>'");
		auto name = split_ws(l.substr(0, colon));
		if(name.size() != 1)
			throw LoadError(file, i + 1, "expected exactly one module name before ':'");
		auto& deps = out[name[0]];
		for(auto& d : split_ws(l.substr(colon + 1)))
			if(std::find(deps.begin(), deps.end(), d) == deps.end())
				deps.push_back(std::move(d));
	}
	return out;
}

/// Builds a corpus from the line-parallel features/labels bodies. Fails
/// atomically: either every example is valid or an error is thrown.
inline Corpus parse_corpus(std::vector<std::string> const& feature_lines,
	std::vector<std::string> const& label_lines,
	std::map<std::string, std::vector<std::string>> modules = {},
	std::string const& features_name = "features", std::string const& labels_name = "labels")
{
	if(feature_lines.size() != label_lines.size())
		throw LoadError(features_name, 0,
			"line count mismatch: " + std::to_string(feature_lines.size()) + " feature lines vs "
				+ std::to_string(label_lines.size()) + " label lines in " + labels_name);

	Corpus c;
	c.modules = std::move(modules);
	c.examples.reserve(feature_lines.size());
	std::unordered_set<std::string> ids;
	for(std::size_t i = 0; i < feature_lines.size(); ++i) {
		auto feats = split_ws(feature_lines[i]);
		if(feats.empty())
			throw LoadError(features_name, i + 1, "empty feature set");
		for(auto const& f : feats)
			if(feature_arity(f) == 0)
				throw LoadError(features_name, i + 1, "malformed feature '" + f + "'");

		auto labels = split_ws(label_lines[i]);
		if(labels.empty())
			throw LoadError(labels_name, i + 1, "missing theorem id");
		if(labels.size() == 1)
			throw LoadError(labels_name, i + 1, "empty premise list for '" + labels[0] + "'");

		Example e;
		std::tie(e.module, e.id) = split_labels_id(labels[0]);
		if(e.id.empty() || e.module.empty())
			throw LoadError(labels_name, i + 1, "malformed theorem id '" + labels[0] + "'");
		if(!ids.insert(e.id).second)
			throw LoadError(labels_name, i + 1, "duplicate theorem id '" + e.id + "'");
		e.features = FeatureSet(std::move(feats));
		e.premises = NameSet(std::vector<std::string>(labels.begin() + 1, labels.end()));
		c.examples.push_back(std::move(e));
	}
	c.register_modules();
	return c;
}

struct CorpusPaths {
	std::string features;
	std::string labels;
	std::string deps; // optional
};

inline Corpus load_corpus(CorpusPaths const& paths)
{
	auto feature_lines = read_lines(paths.features);
	auto label_lines = read_lines(paths.labels);
	std::map<std::string, std::vector<std::string>> modules;
	if(!paths.deps.empty())
		modules = parse_deps(read_lines(paths.deps), paths.deps);
	return parse_corpus(feature_lines, label_lines, std::move(modules), paths.features, paths.labels);
}

inline std::string format_features_line(FeatureSet const& fs)
{
	std::string l;
	for(auto const& f : fs) {
		if(!l.empty())
			l += ' ';
		l += f;
	}
	return l;
}

inline std::string format_labels_line(Example const& e)
{
	std::string l = labels_id_token(e);
	for(auto const& p : e.premises) {
		l += ' ';
		l += p;
	}
	return l;
}

inline std::vector<std::string> format_deps(std::map<std::string, std::vector<std::string>> const& modules)
{
	std::vector<std::string> lines;
	for(auto const& [m, deps] : modules) {
		std::string l = m + ":";
		for(auto const& d : deps)
			l += ' ' + d;
		lines.push_back(std::move(l));
	}
	return lines;
}

inline void save_corpus(Corpus const& c, CorpusPaths const& paths)
{
	std::vector<std::string> feats, labels;
	feats.reserve(c.size());
	labels.reserve(c.size());
	for(auto const& e : c.examples) {
		feats.push_back(format_features_line(e.features));
		labels.push_back(format_labels_line(e));
	}
	write_lines(paths.features, feats);
	write_lines(paths.labels, labels);
	if(!paths.deps.empty())
		write_lines(paths.deps, format_deps(c.modules));
}

/// Proof sources file: `<id> <proof text ...>` per line.
inline std::unordered_map<std::string, std::string> parse_sources(std::vector<std::string> const& lines)
{
	std::unordered_map<std::string, std::string> out;
	for(auto const& l : lines) {
		auto first = l.find_first_not_of(" \t");
		if(first == std::string::npos || l[first] == '#')
			continue;
		auto end = l.find_first_of(" \t", first);
		std::string id = l.substr(first, end == std::string::npos ? std::string::npos : end - first);
		auto [module, name] = split_labels_id(id);
		out[name] = end == std::string::npos ? std::string() : l.substr(end + 1);
	}
	return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpora

struct SyntheticConfig {
	std::uint64_t seed = 1;
	std::size_t n_examples = 1000;
	std::size_t n_features = 2000;
	std::size_t n_premises = 400;
	// Probability that an example carries each of its cluster's signature
	// features.
	double sparsity = 0.3;
	std::size_t noise_features = 2;
	// Shared vocabulary: background feature r appears with probability
	// 1/(r+2), like the Eq/OfNat heads that occur in most statements.
	std::size_t common_features = 24;
	// Clusters are grouped into topics of this many. Each topic has four
	// features, drawn with probability 1/2; the first two trigger premises
	// shared by the whole topic.
	std::size_t clusters_per_topic = 8;
};

/// A corpus with planted structure. Past a block of common background
/// features, the vocabulary is split into topic features and cluster
/// signatures. An example picks a cluster, draws the cluster's signature
/// features independently with probability `sparsity` and uses the cluster
/// premise paired with each drawn trigger feature. Its topic's features work
/// the same way with topic premises. Background features and
/// `noise_features` uniform features decide nothing. Modules form a chain of library modules
/// plus ~20% leaf modules, so split_corpus yields an 80/20 split for
/// block-aligned sizes.
inline Corpus generate_synthetic(SyntheticConfig const& cfg)
{
	if(cfg.n_examples == 0 || cfg.n_features == 0 || cfg.n_premises == 0)
		throw Error("generate_synthetic: counts must be positive");
	if(!(cfg.sparsity > 0.0 && cfg.sparsity <= 1.0))
		throw Error("generate_synthetic: sparsity must be in (0, 1]");

	std::mt19937_64 rng(cfg.seed);
	std::size_t const n_common = std::min(cfg.common_features, cfg.n_features / 8);
	std::size_t const n_clusters =
		std::max<std::size_t>(1, std::min(cfg.n_premises / 4, (cfg.n_features - n_common) / 8));
	std::size_t const per_topic = std::max<std::size_t>(1, cfg.clusters_per_topic);
	std::size_t const n_topics = (n_clusters + per_topic - 1) / per_topic;
	std::size_t const topic_width = n_topics > 1 && cfg.n_features - n_common >= 8 * n_clusters + 4 * n_topics ? 4 : 0;
	std::size_t const topic0 = n_common;
	std::size_t const cluster0 = topic0 + n_topics * topic_width;
	std::size_t const per_cluster_features = std::max<std::size_t>(1, (cfg.n_features - cluster0) / n_clusters);
	std::size_t const topic_premises = topic_width && cfg.n_premises >= 2 * n_topics + n_clusters ? 2 * n_topics : 0;
	std::size_t const per_cluster_premises = std::min(
		per_cluster_features, std::max<std::size_t>(1, (cfg.n_premises - topic_premises) / n_clusters));

	auto feature_name = [](std::size_t j) {
		return std::string(j % 2 ? "H:f" : "T:f") + std::to_string(j);
	};
	auto premise_name = [](std::size_t j) { return "p" + std::to_string(j); };

	std::size_t const n_modules = std::max<std::size_t>(1, cfg.n_examples / 50);
	std::size_t const n_leaves = n_modules == 1 ? 1 : std::max<std::size_t>(1, n_modules / 5);
	std::size_t const n_library = n_modules - n_leaves;
	auto module_name = [](std::size_t m) { return "Synth.M" + std::to_string(m); };

	Corpus c;
	for(std::size_t m = 0; m < n_modules; ++m) {
		auto& deps = c.modules[module_name(m)];
		if(m < n_library) {
			if(m > 0)
				deps.push_back(module_name(m - 1));
		} else if(n_library > 0) {
			// the tip of the library chain, so no library module ends up a leaf
			deps.push_back(module_name(n_library - 1));
		}
	}

	std::uniform_int_distribution<std::size_t> pick_cluster(0, n_clusters - 1);
	std::uniform_int_distribution<std::size_t> pick_feature(0, cfg.n_features - 1);
	std::bernoulli_distribution draw(cfg.sparsity);
	std::bernoulli_distribution coin(0.5);

	c.examples.reserve(cfg.n_examples);
	for(std::size_t i = 0; i < cfg.n_examples; ++i) {
		std::size_t const cluster = pick_cluster(rng);
		std::size_t const f0 = cluster0 + cluster * per_cluster_features;
		std::size_t const p0 = topic_premises + cluster * per_cluster_premises;

		std::vector<std::string> feats;
		std::vector<std::string> prems;
		for(std::size_t j = 0; j < per_cluster_features && f0 + j < cfg.n_features; ++j) {
			if(!draw(rng))
				continue;
			feats.push_back(feature_name(f0 + j));
			if(j < per_cluster_premises && p0 + j < cfg.n_premises)
				prems.push_back(premise_name(p0 + j));
		}
		if(prems.empty()) {
			feats.push_back(feature_name(std::min(f0, cfg.n_features - 1)));
			prems.push_back(premise_name(std::min(p0, cfg.n_premises - 1)));
		}
		std::size_t const topic = cluster / per_topic;
		for(std::size_t j = 0; j < topic_width; ++j) {
			if(!coin(rng))
				continue;
			feats.push_back(feature_name(topic0 + topic * topic_width + j));
			if(j < 2 && topic_premises)
				prems.push_back(premise_name(2 * topic + j));
		}
		for(std::size_t r = 0; r < n_common; ++r)
			if(std::bernoulli_distribution(1.0 / static_cast<double>(r + 2))(rng))
				feats.push_back(feature_name(r));
		for(std::size_t k = 0; k < cfg.noise_features; ++k)
			feats.push_back(feature_name(pick_feature(rng)));

		Example e;
		e.id = "thm" + std::to_string(i);
		e.module = module_name(std::min(n_modules - 1, i * n_modules / cfg.n_examples));
		e.features = FeatureSet(std::move(feats));
		e.premises = NameSet(std::move(prems));
		c.examples.push_back(std::move(e));
	}
	return c;
}

} // namespace premsel
