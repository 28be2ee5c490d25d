// premsel: command-line front end for featurizing, filtering, splitting,
// training, evaluating and serving premise-selection models.

#include <premsel/premsel.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace premsel;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
	return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// `--config F` on the command line wins over $PREMSEL_CONFIG.
std::optional<std::string> config_path(int argc, char** argv)
{
	for(int i = 1; i < argc; ++i) {
		std::string_view a = argv[i];
		if(a == "--config" && i + 1 < argc)
			return std::string(argv[i + 1]);
		if(a.rfind("--config=", 0) == 0)
			return std::string(a.substr(9));
	}
	if(char const* env = std::getenv("PREMSEL_CONFIG"); env && *env)
		return std::string(env);
	return std::nullopt;
}

// Config values become option defaults, so an explicit flag still wins.
// Keys are option names, optionally qualified by subcommand: `trees = 100`
// or `train.trees = 100`.
void apply_config(CLI::App& app, std::map<std::string, std::string> const& cfg)
{
	for(auto* sub : app.get_subcommands([](CLI::App*) { return true; })) {
		for(auto* opt : sub->get_options()) {
			auto const name = opt->get_single_name();
			if(name.empty() || name == "help")
				continue;
			auto it = cfg.find(sub->get_name() + "." + name);
			if(it == cfg.end())
				it = cfg.find(name);
			if(it == cfg.end())
				continue;
			if(opt->get_type_size() == 0) {
				if(it->second == "true" || it->second == "1")
					opt->default_str("true")->default_val(true);
			} else {
				opt->default_val(it->second);
			}
		}
	}
}

std::vector<std::string> read_names(std::string const& path)
{
	std::vector<std::string> out;
	for(auto const& l : read_lines(path)) {
		if(!l.empty() && l[0] == '#')
			continue;
		for(auto& t : split_ws(l))
			out.push_back(std::move(t));
	}
	return out;
}

void print_stats(std::ostream& os, CorpusStats const& s)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.2f", s.premises_per_example);
	os << "total_premises=" << s.total_premises << " total_examples=" << s.total_examples
	   << " premises_per_example=" << buf << '\n';
}

std::string echo(ForestConfig const& c)
{
	std::ostringstream os;
	os << "trees=" << c.n_trees << " p=" << detail::format_double(c.example_sampling_prob) << " passes=" << c.n_passes
	   << " leaf_split_threshold=" << c.leaf_split_threshold << " candidates=" << c.n_candidate_features
	   << " seed=" << c.rng_seed << " shuffle=" << (c.shuffle_passes ? "on" : "off");
	return os.str();
}

// --- featurize -------------------------------------------------------------

struct FeaturizeArgs {
	std::string statements, features = "n+b", out, ids_out;
};

int run_featurize(FeaturizeArgs const& a)
{
	auto cfg = parse_feature_config(a.features);
	auto statements = parse_statements(read_lines(a.statements));
	std::vector<std::string> lines, ids;
	for(auto const& s : statements) {
		lines.push_back(format_features_line(featurize(s, cfg)));
		ids.push_back(s.name);
	}
	write_lines(a.out, lines);
	if(!a.ids_out.empty())
		write_lines(a.ids_out, ids);
	std::cout << "featurized " << statements.size() << " statements (" << to_string(cfg) << ")\n";
	return 0;
}

// --- filter ----------------------------------------------------------------

struct FilterArgs {
	std::string labels, kind, whitelist, sources, out, features, features_out;
};

int run_filter(FilterArgs const& a)
{
	auto kind = parse_filter_kind(a.kind);
	FilterContext ctx;
	if(kind == FilterKind::math) {
		if(a.whitelist.empty())
			throw Error("filter --kind math requires --whitelist");
		ctx.math_whitelist = NameSet(read_names(a.whitelist));
	}
	if(kind == FilterKind::source) {
		if(a.sources.empty())
			throw Error("filter --kind source requires --sources");
		ctx.source_texts = parse_sources(read_lines(a.sources));
	}
	if(a.features.empty() != a.features_out.empty())
		throw Error("--features and --features-out go together");

	auto label_lines = read_lines(a.labels);
	std::vector<std::string> feature_lines;
	if(!a.features.empty()) {
		feature_lines = read_lines(a.features);
		if(feature_lines.size() != label_lines.size())
			throw Error("line count mismatch: " + std::to_string(feature_lines.size()) + " feature lines vs "
				+ std::to_string(label_lines.size()) + " label lines");
	}

	Corpus kept;
	std::vector<std::string> out_labels, out_features;
	for(std::size_t i = 0; i < label_lines.size(); ++i) {
		auto toks = split_ws(label_lines[i]);
		if(toks.empty())
			throw LoadError(a.labels, i + 1, "missing theorem id");
		Example e;
		std::tie(e.module, e.id) = split_labels_id(toks[0]);
		NameSet raw(std::vector<std::string>(toks.begin() + 1, toks.end()));
		e.premises = filter_premises(raw, kind, ctx, e.id);
		if(e.premises.empty())
			continue;
		out_labels.push_back(format_labels_line(e));
		if(!feature_lines.empty())
			out_features.push_back(feature_lines[i]);
		kept.examples.push_back(std::move(e));
	}
	write_lines(a.out, out_labels);
	if(!a.features_out.empty())
		write_lines(a.features_out, out_features);
	std::cout << "filter=" << to_string(kind) << " kept " << kept.size() << " of " << label_lines.size()
	          << " examples\n";
	print_stats(std::cout, corpus_stats(kept));
	return 0;
}

// --- split / stats / generate ----------------------------------------------

struct CorpusArgs {
	std::string features, labels, deps;
	CorpusPaths paths() const { return {features, labels, deps}; }
};

struct SplitArgs {
	CorpusArgs in;
	std::string train_prefix, test_prefix;
};

int run_split(SplitArgs const& a)
{
	auto corpus = load_corpus(a.in.paths());
	auto s = split_corpus(std::move(corpus));
	auto leaves = leaf_modules(s.train.modules);
	std::cout << "modules: " << leaves.size() << " test, " << s.train.modules.size() - leaves.size() << " train\n";
	std::cout << "examples: " << s.test.size() << " test, " << s.train.size() << " train\n";
	save_corpus(s.train, {a.train_prefix + ".features", a.train_prefix + ".labels", a.train_prefix + ".deps"});
	save_corpus(s.test, {a.test_prefix + ".features", a.test_prefix + ".labels", a.test_prefix + ".deps"});
	return 0;
}

int run_stats(CorpusArgs const& a)
{
	auto c = load_corpus(a.paths());
	print_stats(std::cout, corpus_stats(c));
	std::cout << "features=" << to_string(c.feature_config()) << " modules=" << c.modules.size() << '\n';
	return 0;
}

struct GenerateArgs {
	SyntheticConfig cfg;
	std::string prefix;
};

int run_generate(GenerateArgs const& a)
{
	auto c = generate_synthetic(a.cfg);
	save_corpus(c, {a.prefix + ".features", a.prefix + ".labels", a.prefix + ".deps"});
	print_stats(std::cout, corpus_stats(c));
	return 0;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
	std::string model = "forest";
	CorpusArgs in;
	std::string out, init_model;
	ForestConfig forest;
	KnnConfig knn;
	unsigned threads = 1;
};

int run_train(TrainArgs const& a)
{
	auto const t0 = std::chrono::steady_clock::now();
	auto corpus = load_corpus(a.in.paths());
	if(corpus.empty())
		throw Error("train: empty corpus");
	if(a.model == "forest") {
		std::optional<Forest> f;
		if(!a.init_model.empty()) {
			auto m = load_model(a.init_model);
			if(!m.forest)
				throw Error("--init-model must be a forest model");
			f = std::move(*m.forest);
			std::cout << "continuing from " << a.init_model << " (" << f->example_count() << " examples)\n";
		} else {
			f.emplace(a.forest);
		}
		std::cout << "model=forest " << echo(f->config()) << '\n';
		f->train(corpus, a.threads);
		save_model(a.out, *f);
		std::size_t leaves = 0;
		for(std::size_t t = 0; t < f->tree_count(); ++t)
			leaves += f->tree(t).leaf_count();
		std::cout << "examples=" << f->example_count() << " leaves=" << leaves << " features=" << to_string(f->feature_config())
		          << '\n';
	} else if(a.model == "knn") {
		KnnRanker k(corpus, a.knn);
		std::cout << "model=knn k=" << a.knn.k << " weighted=" << (a.knn.similarity_weighted ? 1 : 0) << '\n';
		save_model(a.out, k);
		std::cout << "examples=" << k.size() << " indexed_features=" << k.index().feature_count()
		          << " features=" << to_string(k.feature_config()) << '\n';
	} else {
		throw Error("unknown model '" + a.model + "' (expected forest or knn)");
	}
	std::cout << "wall_seconds=" << seconds_since(t0) << '\n';
	return 0;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
	std::string model_file, test_features, test_labels, out, features, label = "test", report_json;
	unsigned threads = 1;
};

int run_evaluate(EvaluateArgs const& a)
{
	auto m = load_model(a.model_file);
	auto test = load_corpus({a.test_features, a.test_labels, ""});
	FeatureConfig const model_cfg = m.forest ? m.forest->feature_config() : m.knn->feature_config();
	FeatureConfig const cfg = a.features.empty() ? model_cfg : parse_feature_config(a.features);
	EvalResult r = m.forest ? evaluate(*m.forest, test, cfg, a.threads) : evaluate(*m.knn, test, cfg, a.threads);
	write_file(a.out, results_jsonl(r));
	std::string const column = std::string(m.forest ? "forest " : "knn ") + to_string(cfg);
	auto rep = report({{a.label, column, &r}});
	std::cout << rep.text;
	std::cout << "examples=" << r.count() << " mean_prediction_seconds=" << r.mean_seconds
	          << " parallelism=" << r.parallelism << '\n';
	if(!a.report_json.empty())
		write_file(a.report_json, rep.json.dump(2) + '\n');
	return 0;
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
	std::vector<std::string> model_files;
	std::string addr = "127.0.0.1:8080";
	CorpusArgs train;
	KnnConfig knn;
};

int run_serve(ServeArgs const& a)
{
	std::optional<Forest> forest;
	std::optional<KnnRanker> knn;
	for(auto const& path : a.model_files) {
		auto m = load_model(path);
		if(m.forest)
			forest = std::move(m.forest);
		if(m.knn)
			knn = std::move(m.knn);
	}
	if(!a.train.features.empty()) {
		if(knn)
			throw Error("serve: both a k-NN model file and a training corpus were given");
		knn.emplace(load_corpus(a.train.paths()), a.knn);
	}
	auto colon = a.addr.rfind(':');
	if(colon == std::string::npos)
		throw Error("--addr must be HOST:PORT");
	std::string const host = a.addr.substr(0, colon);
	int const port = std::stoi(a.addr.substr(colon + 1));

	SuggestionService service(std::move(forest), std::move(knn));
	httplib::Server server;
	service.mount(server);
	std::cout << "listening on " << host << ':' << port << std::endl;
	if(!server.listen(host, port))
		throw Error("cannot listen on " + a.addr);
	return 0;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Premise selection: featurize, filter, split, train, evaluate, serve"};
	app.require_subcommand(1);
	app.fallthrough(); // lets `premsel train --config F` reach the global option
	std::string config_file;
	app.add_option("--config", config_file, "Flat key=value config file (default: $PREMSEL_CONFIG)");

	FeaturizeArgs fz;
	auto* featurize_cmd = app.add_subcommand("featurize", "Statements file -> features file");
	featurize_cmd->add_option("--statements", fz.statements)->required();
	featurize_cmd->add_option("--features", fz.features, "n, n+b or n+b+t");
	featurize_cmd->add_option("--out", fz.out)->required();
	featurize_cmd->add_option("--ids-out", fz.ids_out, "Also write theorem names, one per line");

	FilterArgs fl;
	auto* filter_cmd = app.add_subcommand("filter", "Apply a premise filter to a labels file");
	filter_cmd->add_option("--labels", fl.labels)->required();
	filter_cmd->add_option("--kind", fl.kind)->required()->check(CLI::IsMember({"all", "source", "math"}));
	filter_cmd->add_option("--whitelist", fl.whitelist);
	filter_cmd->add_option("--sources", fl.sources);
	filter_cmd->add_option("--out", fl.out)->required();
	filter_cmd->add_option("--features", fl.features, "Parallel features file; emptied examples are dropped");
	filter_cmd->add_option("--features-out", fl.features_out);

	SplitArgs sp;
	auto* split_cmd = app.add_subcommand("split", "Split by module dependencies into train/test");
	split_cmd->add_option("--features", sp.in.features)->required();
	split_cmd->add_option("--labels", sp.in.labels)->required();
	split_cmd->add_option("--deps", sp.in.deps)->required();
	split_cmd->add_option("--train-prefix", sp.train_prefix)->required();
	split_cmd->add_option("--test-prefix", sp.test_prefix)->required();

	CorpusArgs st;
	auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
	stats_cmd->add_option("--features", st.features)->required();
	stats_cmd->add_option("--labels", st.labels)->required();
	stats_cmd->add_option("--deps", st.deps);

	GenerateArgs gen;
	auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic planted-cluster corpus");
	generate_cmd->add_option("--seed", gen.cfg.seed);
	generate_cmd->add_option("--examples", gen.cfg.n_examples);
	generate_cmd->add_option("--n-features", gen.cfg.n_features);
	generate_cmd->add_option("--n-premises", gen.cfg.n_premises);
	generate_cmd->add_option("--sparsity", gen.cfg.sparsity);
	generate_cmd->add_option("--prefix", gen.prefix)->required();

	TrainArgs tr;
	auto* train_cmd = app.add_subcommand("train", "Train a forest or build a k-NN index");
	train_cmd->add_option("--model", tr.model)->check(CLI::IsMember({"forest", "knn"}));
	train_cmd->add_option("--features-file", tr.in.features)->required();
	train_cmd->add_option("--labels-file", tr.in.labels)->required();
	train_cmd->add_option("--seed", tr.forest.rng_seed);
	train_cmd->add_option("--trees", tr.forest.n_trees);
	train_cmd->add_option("--sample-p", tr.forest.example_sampling_prob);
	train_cmd->add_option("--passes", tr.forest.n_passes);
	train_cmd->add_option("--leaf-threshold", tr.forest.leaf_split_threshold);
	train_cmd->add_option("--candidates", tr.forest.n_candidate_features);
	train_cmd->add_flag("!--no-shuffle", tr.forest.shuffle_passes, "Keep corpus order in every pass");
	train_cmd->add_option("--k", tr.knn.k);
	train_cmd->add_flag("--weighted", tr.knn.similarity_weighted, "k-NN votes weighted by similarity");
	train_cmd->add_option("--threads", tr.threads);
	train_cmd->add_option("--init-model", tr.init_model, "Continue training an existing forest");
	train_cmd->add_option("--out", tr.out)->required();

	EvaluateArgs ev;
	auto* evaluate_cmd = app.add_subcommand("evaluate", "Cover/Cover+ of a model on a test corpus");
	evaluate_cmd->add_option("--model-file", ev.model_file)->required();
	evaluate_cmd->add_option("--test-features", ev.test_features)->required();
	evaluate_cmd->add_option("--test-labels", ev.test_labels)->required();
	evaluate_cmd->add_option("--out", ev.out)->required();
	evaluate_cmd->add_option("--features", ev.features, "Feature classes of the test corpus (default: the model's)");
	evaluate_cmd->add_option("--label", ev.label, "Row label in the report");
	evaluate_cmd->add_option("--report-json", ev.report_json);
	evaluate_cmd->add_option("--threads", ev.threads);

	ServeArgs sv;
	auto* serve_cmd = app.add_subcommand("serve", "HTTP suggestion service");
	serve_cmd->add_option("--model-file", sv.model_files, "Forest and/or k-NN model files");
	serve_cmd->add_option("--addr", sv.addr);
	serve_cmd->add_option("--train-features", sv.train.features, "Build a k-NN model from this corpus");
	serve_cmd->add_option("--train-labels", sv.train.labels);
	serve_cmd->add_option("--k", sv.knn.k);

	try {
		if(auto path = config_path(argc, argv))
			apply_config(app, parse_flat_config(read_lines(*path)));
	} catch(std::exception const& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	}

	CLI11_PARSE(app, argc, argv);

	try {
		if(*featurize_cmd) return run_featurize(fz);
		if(*filter_cmd) return run_filter(fl);
		if(*split_cmd) return run_split(sp);
		if(*stats_cmd) return run_stats(st);
		if(*generate_cmd) return run_generate(gen);
		if(*train_cmd) return run_train(tr);
		if(*evaluate_cmd) return run_evaluate(ev);
		if(*serve_cmd) {
			if(sv.model_files.empty() && sv.train.features.empty())
				throw Error("serve: give --model-file and/or --train-features/--train-labels");
			return run_serve(sv);
		}
	} catch(std::exception const& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
