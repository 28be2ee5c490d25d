#pragma once

#include <premsel/dataset.hpp>
#include <premsel/ranking.hpp>

#include <algorithm>
#include <cmath>
#include <ranges>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace premsel {

struct KnnConfig {
	std::size_t k = 100;
	// Neighbours vote with their similarity instead of 1.
	bool similarity_weighted = false;

	friend bool operator==(KnnConfig const&, KnnConfig const&) = default;
};

/// Document frequencies and postings over a list of feature sets. Feature
/// ids follow the lexicographic order of the feature strings.
class FeatureIndex {
public:
	FeatureIndex() = default;

	template<typename Range>
	explicit FeatureIndex(Range const& feature_sets)
	{
		std::vector<std::string> all;
		for(FeatureSet const& fs : feature_sets)
			all.insert(all.end(), fs.begin(), fs.end());
		std::sort(all.begin(), all.end());
		all.erase(std::unique(all.begin(), all.end()), all.end());
		names_ = std::move(all);
		ids_.reserve(names_.size());
		for(std::uint32_t i = 0; i < names_.size(); ++i)
			ids_.emplace(names_[i], i);
		postings_.resize(names_.size());
		for(FeatureSet const& fs : feature_sets) {
			for(auto const& f : fs)
				postings_[ids_.find(f)->second].push_back(static_cast<std::uint32_t>(doc_count_));
			++doc_count_;
		}
	}

	std::size_t doc_count() const noexcept { return doc_count_; }
	std::size_t feature_count() const noexcept { return names_.size(); }

	std::optional<std::uint32_t> id(std::string_view f) const
	{
		auto it = ids_.find(f);
		if(it == ids_.end())
			return std::nullopt;
		return it->second;
	}

	std::string const& name(std::uint32_t id) const { return names_[id]; }

	std::size_t doc_freq(std::uint32_t id) const { return postings_[id].size(); }

	std::size_t doc_freq(std::string_view f) const
	{
		auto i = id(f);
		return i ? postings_[*i].size() : 0;
	}

	// Examples containing the feature, ascending; empty for unseen features.
	std::span<std::uint32_t const> postings(std::string_view f) const
	{
		auto i = id(f);
		if(!i)
			return {};
		return postings_[*i];
	}

private:
	std::size_t doc_count_ = 0;
	std::vector<std::string> names_;
	std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> ids_;
	std::vector<std::vector<std::uint32_t>> postings_;
};

/// Rarity weight ln(|D| / |D_f|)^2; 0 for features absent from the index.
inline double feature_weight(std::string_view f, FeatureIndex const& idx)
{
	auto const df = idx.doc_freq(f);
	if(df == 0)
		return 0.0;
	double const l = std::log(static_cast<double>(idx.doc_count()) / static_cast<double>(df));
	return l * l;
}

inline double feature_weight(std::uint32_t id, FeatureIndex const& idx)
{
	double const l = std::log(static_cast<double>(idx.doc_count()) / static_cast<double>(idx.doc_freq(id)));
	return l * l;
}

template<typename Weight>
double total_weight(FeatureSet const& fs, Weight&& weight)
{
	double s = 0.0;
	for(auto const& f : fs)
		s += weight(f);
	return s;
}

/// Weighted Jaccard similarity: shared weight over union weight, 0 when the
/// union carries no weight. `weight` maps a feature string to t(f).
template<typename Weight>
double similarity(FeatureSet const& a, FeatureSet const& b, Weight&& weight)
{
	double shared = 0.0;
	auto ia = a.begin();
	auto ib = b.begin();
	while(ia != a.end() && ib != b.end()) {
		if(*ia < *ib) {
			++ia;
		} else if(*ib < *ia) {
			++ib;
		} else {
			shared += weight(*ia);
			++ia;
			++ib;
		}
	}
	if(shared == 0.0)
		return 0.0;
	double const denom = total_weight(a, weight) + total_weight(b, weight) - shared;
	return denom > 0.0 ? shared / denom : 0.0;
}

inline double similarity(FeatureSet const& a, FeatureSet const& b, FeatureIndex const& idx)
{
	return similarity(a, b, [&](std::string const& f) { return feature_weight(f, idx); });
}

class KnnError : public Error {
public:
	using Error::Error;
};

/// Lazy ranker over a stored training set.
class KnnRanker {
public:
	KnnRanker() = default;

	KnnRanker(std::vector<Example> train, KnnConfig cfg, FeatureConfig features)
		: train_(std::move(train))
		, cfg_(cfg)
		, features_(features)
	{
		if(cfg_.k == 0)
			throw KnnError("k must be at least 1");
		rebuild();
	}

	KnnRanker(Corpus const& train, KnnConfig cfg)
		: KnnRanker(train.examples, cfg, train.feature_config())
	{}

	KnnConfig const& config() const noexcept { return cfg_; }
	FeatureConfig const& feature_config() const noexcept { return features_; }
	FeatureIndex const& index() const noexcept { return index_; }
	std::vector<Example> const& examples() const noexcept { return train_; }
	std::size_t size() const noexcept { return train_.size(); }

	/// Appends a training example. The index is rebuilt since every weight
	/// depends on |D|.
	void add_example(Example e)
	{
		train_.push_back(std::move(e));
		rebuild();
	}

	// Indices of the k most similar training examples, most similar first,
	// ties by ascending index; paired with their similarity. Every training
	// example is scored.
	std::vector<std::pair<std::uint32_t, double>> neighbours(FeatureSet const& query) const
	{
		if(train_.empty())
			throw KnnError("k-NN: empty training corpus");

		// Unseen features weigh 0 and can be dropped; the remaining ids are
		// ascending because ids preserve string order.
		std::vector<std::uint32_t> q;
		q.reserve(query.size());
		double query_weight = 0.0;
		for(auto const& f : query) {
			if(auto id = index_.id(f)) {
				q.push_back(*id);
				query_weight += weight_[*id];
			}
		}

		std::size_t const n = train_.size();
		std::vector<std::pair<std::uint32_t, double>> sims;
		sims.reserve(n);
		for(std::uint32_t d = 0; d < n; ++d) {
			auto const& doc = doc_features_[d];
			double shared = 0.0;
			auto iq = q.begin();
			auto id = doc.begin();
			while(iq != q.end() && id != doc.end()) {
				if(*iq < *id) {
					++iq;
				} else if(*id < *iq) {
					++id;
				} else {
					shared += weight_[*iq];
					++iq;
					++id;
				}
			}
			double sim = 0.0;
			if(shared != 0.0) {
				double const denom = query_weight + doc_weight_[d] - shared;
				sim = denom > 0.0 ? shared / denom : 0.0;
			}
			sims.emplace_back(d, sim);
		}

		auto closer = [](auto const& a, auto const& b) {
			return a.second != b.second ? a.second > b.second : a.first < b.first;
		};
		std::size_t const k = std::min(cfg_.k, n);
		if(k < n)
			std::nth_element(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(k), sims.end(), closer);
		sims.resize(k);
		std::sort(sims.begin(), sims.end(), closer);
		return sims;
	}

	Ranking rank(FeatureSet const& query) const
	{
		std::unordered_map<std::string_view, double> votes;
		for(auto const& [d, sim] : neighbours(query))
			for(auto const& p : train_[d].premises)
				votes[p] += cfg_.similarity_weighted ? sim : 1.0;
		return make_ranking(votes);
	}

private:
	void rebuild()
	{
		index_ = FeatureIndex(train_ | std::views::transform([](Example const& e) -> FeatureSet const& { return e.features; }));
		weight_.resize(index_.feature_count());
		for(std::uint32_t i = 0; i < weight_.size(); ++i)
			weight_[i] = feature_weight(i, index_);
		doc_features_.clear();
		doc_weight_.clear();
		doc_features_.reserve(train_.size());
		doc_weight_.reserve(train_.size());
		for(auto const& e : train_) {
			std::vector<std::uint32_t> ids;
			ids.reserve(e.features.size());
			double w = 0.0;
			for(auto const& f : e.features) {
				ids.push_back(*index_.id(f));
				w += weight_[ids.back()];
			}
			doc_features_.push_back(std::move(ids));
			doc_weight_.push_back(w);
		}
	}

	std::vector<Example> train_;
	KnnConfig cfg_;
	FeatureConfig features_;
	FeatureIndex index_;
	std::vector<double> weight_;
	std::vector<std::vector<std::uint32_t>> doc_features_;
	std::vector<double> doc_weight_;
};

// ---------------------------------------------------------------------------
// Model file
//
//   premsel-knn 1
//   k <k>
//   weighted <0|1>
//   features <n|n+b|...>
//   examples <count>
//   <labels line>\t<features line>     (count times)

inline constexpr std::string_view knn_magic = "premsel-knn";

inline std::string serialize(KnnRanker const& m)
{
	std::ostringstream out;
	out << knn_magic << " 1\n";
	out << "k " << m.config().k << '\n';
	out << "weighted " << (m.config().similarity_weighted ? 1 : 0) << '\n';
	out << "features " << to_string(m.feature_config()) << '\n';
	out << "examples " << m.size() << '\n';
	for(auto const& e : m.examples())
		out << format_labels_line(e) << '\t' << format_features_line(e.features) << '\n';
	return out.str();
}

inline KnnRanker deserialize_knn(std::vector<std::string> const& lines)
{
	auto fail = [](std::size_t line, std::string const& what) -> LoadError {
		return LoadError("knn model", line, what);
	};
	auto field = [&](std::size_t i, std::string_view key) {
		if(i >= lines.size())
			throw fail(i + 1, "truncated model, expected '" + std::string(key) + "'");
		auto toks = split_ws(lines[i]);
		if(toks.size() != 2 || toks[0] != key)
			throw fail(i + 1, "expected '" + std::string(key) + " <value>'");
		return toks[1];
	};
	if(lines.empty() || lines[0] != std::string(knn_magic) + " 1")
		throw fail(1, "not a version-1 k-NN model file");

	KnnConfig cfg;
	try {
		cfg.k = std::stoull(field(1, "k"));
		cfg.similarity_weighted = field(2, "weighted") == "1";
	} catch(std::logic_error const&) {
		throw fail(2, "malformed number");
	}
	auto features = parse_feature_config(field(3, "features"));
	std::size_t const count = std::stoull(field(4, "examples"));
	if(lines.size() < 5 + count)
		throw fail(lines.size(), "truncated model: expected " + std::to_string(count) + " examples");

	std::vector<std::string> labels, feats;
	for(std::size_t i = 0; i < count; ++i) {
		auto const& l = lines[5 + i];
		auto tab = l.find('\t');
		if(tab == std::string::npos)
			throw fail(6 + i, "expected '<labels>\\t<features>'");
		labels.push_back(l.substr(0, tab));
		feats.push_back(l.substr(tab + 1));
	}
	auto corpus = parse_corpus(feats, labels);
	return KnnRanker(std::move(corpus.examples), cfg, features);
}

} // namespace premsel
