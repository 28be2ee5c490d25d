#pragma once

#include <premsel/dataset.hpp>
#include <premsel/ranking.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <concepts>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace premsel {

template<typename R>
concept Ranker = requires(R const& r, FeatureSet const& fs) {
	{ r.rank(fs) } -> std::convertible_to<Ranking>;
	{ r.feature_config() } -> std::convertible_to<FeatureConfig>;
};

class EvalError : public Error {
public:
	using Error::Error;
};

/// |P ∩ R[:window]| / |P|, where R[:window] holds the first
/// min(window, |R|) premises.
inline double coverage(NameSet const& used, Ranking const& ranking, std::size_t window)
{
	if(used.empty())
		throw EvalError("cover: empty premise set");
	std::size_t const end = std::min(window, ranking.size());
	std::size_t hits = 0;
	for(std::size_t i = 0; i < end; ++i)
		if(used.contains(ranking[i].premise))
			++hits;
	return static_cast<double>(hits) / static_cast<double>(used.size());
}

inline double cover(NameSet const& used, Ranking const& ranking)
{
	return coverage(used, ranking, used.size());
}

// Window of n + 10.
inline double cover_plus(NameSet const& used, Ranking const& ranking)
{
	return coverage(used, ranking, used.size() + 10);
}

struct ExampleResult {
	std::string id;
	std::size_t n = 0;
	double cover = 0.0;
	double cover_plus = 0.0;
	double seconds = 0.0;
};

struct EvalResult {
	std::vector<ExampleResult> examples;
	double mean_cover = 0.0;
	double mean_cover_plus = 0.0;
	double mean_seconds = 0.0;
	unsigned parallelism = 1;

	std::size_t count() const noexcept { return examples.size(); }
};

inline void aggregate(EvalResult& r)
{
	double c = 0.0, cp = 0.0, s = 0.0;
	for(auto const& e : r.examples) {
		c += e.cover;
		cp += e.cover_plus;
		s += e.seconds;
	}
	auto const n = static_cast<double>(std::max<std::size_t>(1, r.examples.size()));
	r.mean_cover = c / n;
	r.mean_cover_plus = cp / n;
	r.mean_seconds = s / n;
}

/// Scores the model's ranking for every test example. Only the `rank` call
/// is timed. `features` names the feature classes of the test corpus; it
/// must match the model's.
template<Ranker R>
EvalResult evaluate(R const& model, Corpus const& test, FeatureConfig const& features, unsigned threads = 1)
{
	if(test.empty())
		throw EvalError("evaluate: empty test corpus");
	if(!(FeatureConfig(model.feature_config()) == features))
		throw EvalError("evaluate: feature-config mismatch (model " + to_string(model.feature_config())
			+ ", test " + to_string(features) + ")");
	if(!test.feature_config().subset_of(features))
		throw EvalError("evaluate: test corpus contains features of class " + to_string(test.feature_config())
			+ " outside " + to_string(features));

	EvalResult out;
	out.examples.resize(test.size());
	auto run = [&](std::size_t first, std::size_t stride) {
		for(std::size_t i = first; i < test.size(); i += stride) {
			auto const& e = test.examples[i];
			auto const t0 = std::chrono::steady_clock::now();
			Ranking r = model.rank(e.features);
			auto const t1 = std::chrono::steady_clock::now();
			auto& res = out.examples[i];
			res.id = e.id;
			res.n = e.premises.size();
			res.cover = cover(e.premises, r);
			res.cover_plus = cover_plus(e.premises, r);
			res.seconds = std::chrono::duration<double>(t1 - t0).count();
		}
	};
	out.parallelism = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(test.size()));
	if(out.parallelism == 1) {
		run(0, 1);
	} else {
		std::vector<std::jthread> pool;
		for(unsigned w = 0; w < out.parallelism; ++w)
			pool.emplace_back(run, w, out.parallelism);
	}
	aggregate(out);
	return out;
}

/// One record per example plus a trailing aggregate record, JSON Lines.
inline std::string results_jsonl(EvalResult const& r)
{
	std::string out;
	for(auto const& e : r.examples) {
		nlohmann::json j = {{"id", e.id}, {"n", e.n}, {"cover", e.cover}, {"cover_plus", e.cover_plus},
			{"prediction_seconds", e.seconds}};
		out += j.dump() + '\n';
	}
	nlohmann::json agg = {{"aggregate",
		{{"examples", r.count()}, {"mean_cover", r.mean_cover}, {"mean_cover_plus", r.mean_cover_plus},
			{"mean_prediction_seconds", r.mean_seconds}, {"parallelism", r.parallelism}}}};
	out += agg.dump() + '\n';
	return out;
}

// ---------------------------------------------------------------------------
// Table-style report

struct LabeledResult {
	std::string row;    // e.g. premise filter
	std::string column; // e.g. "forest n+b"
	EvalResult const* result = nullptr;
};

struct Report {
	std::string text;
	nlohmann::json json;
};

/// Grid of `cover (cover_plus)` cells. Rows keep first-appearance order,
/// columns are sorted lexicographically, and the best cover of each row is
/// starred (first column wins ties).
inline Report report(std::vector<LabeledResult> const& results)
{
	if(results.empty())
		throw EvalError("report: no results");

	std::vector<std::string> rows;
	std::vector<std::string> cols;
	std::map<std::pair<std::string, std::string>, EvalResult const*> cells;
	for(auto const& r : results) {
		if(std::find(rows.begin(), rows.end(), r.row) == rows.end())
			rows.push_back(r.row);
		if(std::find(cols.begin(), cols.end(), r.column) == cols.end())
			cols.push_back(r.column);
		cells[{r.row, r.column}] = r.result;
	}
	std::sort(cols.begin(), cols.end());

	auto fmt = [](double v) {
		char buf[32];
		std::snprintf(buf, sizeof buf, "%.3f", v);
		return std::string(buf);
	};

	Report rep;
	rep.json = {{"rows", rows}, {"columns", cols}, {"cells", nlohmann::json::array()}};
	std::vector<std::vector<std::string>> grid;
	grid.push_back({"premises"});
	grid[0].insert(grid[0].end(), cols.begin(), cols.end());
	for(auto const& row : rows) {
		std::string best_col;
		double best = -1.0;
		for(auto const& col : cols) {
			auto it = cells.find({row, col});
			if(it != cells.end() && it->second->mean_cover > best) {
				best = it->second->mean_cover;
				best_col = col;
			}
		}
		std::vector<std::string> line{row};
		for(auto const& col : cols) {
			auto it = cells.find({row, col});
			if(it == cells.end()) {
				line.push_back("-");
				continue;
			}
			auto const& r = *it->second;
			bool const is_best = col == best_col;
			line.push_back((is_best ? "*" : "") + fmt(r.mean_cover) + " (" + fmt(r.mean_cover_plus) + ")");
			rep.json["cells"].push_back({{"row", row}, {"column", col}, {"cover", r.mean_cover},
				{"cover_plus", r.mean_cover_plus}, {"mean_prediction_seconds", r.mean_seconds},
				{"examples", r.count()}, {"parallelism", r.parallelism}, {"best", is_best}});
		}
		grid.push_back(std::move(line));
	}

	std::vector<std::size_t> width(grid[0].size(), 0);
	for(auto const& line : grid)
		for(std::size_t c = 0; c < line.size(); ++c)
			width[c] = std::max(width[c], line[c].size());
	for(auto const& line : grid) {
		std::string l;
		for(std::size_t c = 0; c < line.size(); ++c) {
			if(c)
				l += "  ";
			l += line[c];
			if(c + 1 < line.size())
				l.append(width[c] - line[c].size(), ' ');
		}
		rep.text += l + '\n';
	}
	return rep;
}

} // namespace premsel
