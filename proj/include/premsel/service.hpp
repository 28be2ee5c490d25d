#pragma once

#include <premsel/forest.hpp>
#include <premsel/knn.hpp>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace premsel {

// Wire schema (JSON):
//
//   POST /suggest  {"statement": <statement>} | {"features": [<feature>...]},
//                  "model": "forest"|"knn" (optional), "max_suggestions": n >= 1 (default 32)
//             ->   {"suggestions": [{"premise", "score", "action_hint"}...],
//                   "model": ..., "model_version": n, "elapsed": seconds}
//   POST /learn    {"statement" | "features"} as above, "premises": [<name>...] (non-empty),
//                  "id": <name> (optional)
//             ->   {"model_version": n, "id": <stored id>}
//   GET  /health   {"status": "ok", "model_version": n, "models": {...}}
//
//   <statement> is either a `THM <name> CONCL <sexp> HYP <sexp>...` line or
//   {"conclusion": <sexp>, "hypotheses": [<sexp>...], "name": <name>}.
//   Errors: 4xx with {"error": <reason>}.

inline constexpr std::size_t default_max_suggestions = 32;

enum class ModelKind { forest, knn };

inline std::string_view to_string(ModelKind m) noexcept
{
	return m == ModelKind::forest ? "forest" : "knn";
}

class RequestError : public Error {
public:
	explicit RequestError(std::string const& what, int status = 400)
		: Error(what)
		, status_(status)
	{}

	int status() const noexcept { return status_; }

private:
	int status_;
};

struct SuggestRequest {
	std::optional<Statement> statement;
	std::optional<FeatureSet> features;
	std::optional<ModelKind> model;
	std::size_t max_suggestions = default_max_suggestions;

	friend bool operator==(SuggestRequest const&, SuggestRequest const&) = default;
};

struct Suggestion {
	std::string premise;
	double score = 0.0;
	// Filled with the premise name; a proof-assistant client may replace it
	// with a tactic that was checked to apply.
	std::string action_hint;

	friend bool operator==(Suggestion const&, Suggestion const&) = default;
};

struct SuggestResponse {
	std::vector<Suggestion> suggestions;
	ModelKind model = ModelKind::forest;
	std::uint64_t model_version = 0;
	double elapsed = 0.0;

	friend bool operator==(SuggestResponse const&, SuggestResponse const&) = default;
};

struct LearnRequest {
	std::optional<Statement> statement;
	std::optional<FeatureSet> features;
	NameSet premises;
	std::optional<std::string> id;

	friend bool operator==(LearnRequest const&, LearnRequest const&) = default;
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline Statement statement_from_json(nlohmann::json const& j)
{
	try {
		if(j.is_string())
			return parse_statement(j.get<std::string>());
		if(!j.is_object() || !j.contains("conclusion") || !j["conclusion"].is_string())
			throw RequestError("statement must be a THM line or an object with a 'conclusion' s-expression");
		Statement s;
		s.name = j.value("name", std::string("goal"));
		s.conclusion = parse_expr(j["conclusion"].get<std::string>());
		if(j.contains("hypotheses")) {
			if(!j["hypotheses"].is_array())
				throw RequestError("'hypotheses' must be an array of s-expressions");
			for(auto const& h : j["hypotheses"]) {
				if(!h.is_string())
					throw RequestError("'hypotheses' must be an array of s-expressions");
				s.hypotheses.push_back(parse_expr(h.get<std::string>()));
			}
		}
		return s;
	} catch(ParseError const& e) {
		throw RequestError(std::string("statement: ") + e.what());
	}
}

inline nlohmann::json statement_to_json(Statement const& s)
{
	nlohmann::json hyps = nlohmann::json::array();
	for(auto const& h : s.hypotheses)
		hyps.push_back(to_string(h));
	return {{"name", s.name}, {"conclusion", to_string(s.conclusion)}, {"hypotheses", hyps}};
}

inline std::vector<std::string> string_array(nlohmann::json const& j, char const* field)
{
	if(!j.is_array())
		throw RequestError(std::string("'") + field + "' must be an array of strings");
	std::vector<std::string> out;
	for(auto const& x : j) {
		if(!x.is_string())
			throw RequestError(std::string("'") + field + "' must be an array of strings");
		out.push_back(x.get<std::string>());
	}
	return out;
}

inline FeatureSet features_from_json(nlohmann::json const& j)
{
	auto v = string_array(j, "features");
	for(auto const& f : v)
		if(feature_arity(f) == 0)
			throw RequestError("malformed feature '" + f + "'");
	return FeatureSet(std::move(v));
}

// Reads exactly one of "statement" / "features".
inline void query_from_json(nlohmann::json const& j, std::optional<Statement>& s, std::optional<FeatureSet>& f)
{
	bool const has_s = j.contains("statement");
	bool const has_f = j.contains("features");
	if(has_s == has_f)
		throw RequestError("exactly one of 'statement' and 'features' is required");
	if(has_s)
		s = statement_from_json(j["statement"]);
	else
		f = features_from_json(j["features"]);
}

inline void query_to_json(nlohmann::json& j, std::optional<Statement> const& s, std::optional<FeatureSet> const& f)
{
	if(s)
		j["statement"] = statement_to_json(*s);
	if(f)
		j["features"] = f->items();
}

inline ModelKind model_from_json(nlohmann::json const& j)
{
	if(j.is_string()) {
		auto s = j.get<std::string>();
		if(s == "forest")
			return ModelKind::forest;
		if(s == "knn")
			return ModelKind::knn;
	}
	throw RequestError("'model' must be \"forest\" or \"knn\"");
}

inline nlohmann::json parse_body(std::string const& body)
{
	auto j = nlohmann::json::parse(body, nullptr, false);
	if(j.is_discarded())
		throw RequestError("request body is not valid JSON");
	if(!j.is_object())
		throw RequestError("request body must be a JSON object");
	return j;
}

} // namespace detail

inline SuggestRequest suggest_request_from_json(nlohmann::json const& j)
{
	SuggestRequest r;
	detail::query_from_json(j, r.statement, r.features);
	if(j.contains("model"))
		r.model = detail::model_from_json(j["model"]);
	if(j.contains("max_suggestions")) {
		auto const& m = j["max_suggestions"];
		if(!m.is_number_integer() || m.get<std::int64_t>() < 1)
			throw RequestError("'max_suggestions' must be an integer >= 1");
		r.max_suggestions = m.get<std::size_t>();
	}
	return r;
}

inline nlohmann::json to_json(SuggestRequest const& r)
{
	nlohmann::json j = nlohmann::json::object();
	detail::query_to_json(j, r.statement, r.features);
	if(r.model)
		j["model"] = std::string(to_string(*r.model));
	j["max_suggestions"] = r.max_suggestions;
	return j;
}

inline LearnRequest learn_request_from_json(nlohmann::json const& j)
{
	LearnRequest r;
	detail::query_from_json(j, r.statement, r.features);
	if(!j.contains("premises"))
		throw RequestError("'premises' is required");
	auto ps = detail::string_array(j["premises"], "premises");
	for(auto const& p : ps)
		if(!valid_name(p))
			throw RequestError("malformed premise name '" + p + "'");
	r.premises = NameSet(std::move(ps));
	if(r.premises.empty())
		throw RequestError("'premises' must be non-empty");
	if(j.contains("id")) {
		if(!j["id"].is_string() || !valid_name(j["id"].get<std::string>()))
			throw RequestError("'id' must be a name without whitespace or '/'");
		r.id = j["id"].get<std::string>();
	}
	return r;
}

inline nlohmann::json to_json(LearnRequest const& r)
{
	nlohmann::json j = nlohmann::json::object();
	detail::query_to_json(j, r.statement, r.features);
	j["premises"] = r.premises.items();
	if(r.id)
		j["id"] = *r.id;
	return j;
}

inline nlohmann::json to_json(SuggestResponse const& r)
{
	nlohmann::json list = nlohmann::json::array();
	for(auto const& s : r.suggestions)
		list.push_back({{"premise", s.premise}, {"score", s.score}, {"action_hint", s.action_hint}});
	return {{"suggestions", list}, {"model", std::string(to_string(r.model))}, {"model_version", r.model_version},
		{"elapsed", r.elapsed}};
}

inline SuggestResponse suggest_response_from_json(nlohmann::json const& j)
{
	SuggestResponse r;
	for(auto const& s : j.at("suggestions"))
		r.suggestions.push_back({s.at("premise").get<std::string>(), s.at("score").get<double>(),
			s.value("action_hint", std::string())});
	r.model = detail::model_from_json(j.at("model"));
	r.model_version = j.at("model_version").get<std::uint64_t>();
	r.elapsed = j.at("elapsed").get<double>();
	return r;
}

// ---------------------------------------------------------------------------

/// Holds the served models. Suggestions take a shared lock, learning an
/// exclusive one, so a suggestion sees the model either before or after a
/// learn, never in between.
class SuggestionService {
public:
	SuggestionService(std::optional<Forest> forest, std::optional<KnnRanker> knn)
		: forest_(std::move(forest))
		, knn_(std::move(knn))
	{
		if(!forest_ && !knn_)
			throw Error("service: no model loaded");
	}

	std::uint64_t model_version() const
	{
		std::shared_lock lock(mutex_);
		return version_;
	}

	SuggestResponse suggest(SuggestRequest const& req) const
	{
		if(req.max_suggestions < 1)
			throw RequestError("'max_suggestions' must be >= 1");
		std::shared_lock lock(mutex_);
		ModelKind const kind = pick(req.model);
		auto const query = req.features ? *req.features : featurize(*req.statement, features_of(kind));

		SuggestResponse resp;
		resp.model = kind;
		resp.model_version = version_;
		auto const t0 = std::chrono::steady_clock::now();
		Ranking r;
		try {
			r = kind == ModelKind::forest ? forest_->rank(query) : knn_->rank(query);
		} catch(ForestError const& e) {
			throw RequestError(e.what(), 409);
		} catch(KnnError const& e) {
			throw RequestError(e.what(), 409);
		}
		resp.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		truncate(r, req.max_suggestions);
		for(auto& s : r)
			resp.suggestions.push_back({s.premise, s.score, s.premise});
		return resp;
	}

	struct LearnResult {
		std::uint64_t model_version;
		std::string id;
	};

	/// Adds one example to every loaded model and bumps the version.
	LearnResult learn(LearnRequest const& req)
	{
		if(req.premises.empty())
			throw RequestError("'premises' must be non-empty");
		std::unique_lock lock(mutex_);
		Example e;
		e.features = req.features ? *req.features : featurize(*req.statement, features_of(pick(std::nullopt)));
		if(e.features.empty())
			throw RequestError("example has no features");
		e.premises = req.premises;
		e.module = "_learned";
		e.id = req.id.value_or(req.statement ? req.statement->name : std::string("example")) + "#"
			+ std::to_string(version_ + 1);
		if(forest_)
			forest_->update(e);
		if(knn_)
			knn_->add_example(e);
		++version_;
		return {version_, e.id};
	}

	// Calls f(Forest const*, KnnRanker const*) under the shared lock; either
	// pointer is null when that model is not loaded.
	template<typename F>
	decltype(auto) inspect(F&& f) const
	{
		std::shared_lock lock(mutex_);
		return f(forest_ ? &*forest_ : nullptr, knn_ ? &*knn_ : nullptr);
	}

	nlohmann::json health() const
	{
		std::shared_lock lock(mutex_);
		nlohmann::json models = nlohmann::json::object();
		if(forest_) {
			auto const& c = forest_->config();
			models["forest"] = {{"examples", forest_->example_count()}, {"trees", c.n_trees},
				{"sample_p", c.example_sampling_prob}, {"passes", c.n_passes},
				{"leaf_split_threshold", c.leaf_split_threshold}, {"candidate_features", c.n_candidate_features},
				{"seed", c.rng_seed}, {"features", to_string(forest_->feature_config())}};
		}
		if(knn_) {
			models["knn"] = {{"examples", knn_->size()}, {"k", knn_->config().k},
				{"similarity_weighted", knn_->config().similarity_weighted},
				{"features", to_string(knn_->feature_config())}};
		}
		return {{"status", "ok"}, {"model_version", version_}, {"default_model", std::string(to_string(pick(std::nullopt)))},
			{"models", models}};
	}

	// Body-level handlers: (HTTP status, JSON body).
	std::pair<int, nlohmann::json> handle_suggest(std::string const& body) const
	{
		return guarded([&] { return to_json(suggest(suggest_request_from_json(detail::parse_body(body)))); });
	}

	std::pair<int, nlohmann::json> handle_learn(std::string const& body)
	{
		return guarded([&] {
			auto r = learn(learn_request_from_json(detail::parse_body(body)));
			return nlohmann::json{{"model_version", r.model_version}, {"id", r.id}};
		});
	}

	void mount(httplib::Server& server)
	{
		auto reply = [](httplib::Response& res, std::pair<int, nlohmann::json> const& out) {
			res.status = out.first;
			res.set_content(out.second.dump(), "application/json");
		};
		server.Post("/suggest", [this, reply](httplib::Request const& req, httplib::Response& res) {
			reply(res, handle_suggest(req.body));
		});
		server.Post("/learn", [this, reply](httplib::Request const& req, httplib::Response& res) {
			reply(res, handle_learn(req.body));
		});
		server.Get("/health", [this, reply](httplib::Request const&, httplib::Response& res) {
			reply(res, {200, health()});
		});
	}

private:
	template<typename F>
	static std::pair<int, nlohmann::json> guarded(F&& f)
	{
		try {
			return {200, f()};
		} catch(RequestError const& e) {
			return {e.status(), {{"error", e.what()}}};
		} catch(nlohmann::json::exception const& e) {
			return {400, {{"error", e.what()}}};
		}
	}

	ModelKind pick(std::optional<ModelKind> requested) const
	{
		if(!requested)
			return forest_ ? ModelKind::forest : ModelKind::knn;
		if(*requested == ModelKind::forest && !forest_)
			throw RequestError("no forest model loaded", 404);
		if(*requested == ModelKind::knn && !knn_)
			throw RequestError("no k-NN model loaded", 404);
		return *requested;
	}

	FeatureConfig features_of(ModelKind kind) const
	{
		FeatureConfig cfg = kind == ModelKind::forest ? forest_->feature_config() : knn_->feature_config();
		return cfg.valid() ? cfg : FeatureConfig::names_bigrams();
	}

	mutable std::shared_mutex mutex_;
	std::uint64_t version_ = 0;
	std::optional<Forest> forest_;
	std::optional<KnnRanker> knn_;
};

} // namespace premsel
