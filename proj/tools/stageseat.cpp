// stageseat: server, dataset and fixture utilities.

#include "stageseat/api.hpp"
#include "stageseat/auth.hpp"
#include "stageseat/config.hpp"
#include "stageseat/error.hpp"
#include "stageseat/seed.hpp"
#include "stageseat/sentiment.hpp"
#include "stageseat/store.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <pthread.h>
#include <thread>

using namespace stageseat;

namespace {

int serve(const std::string& config_path, std::optional<int> port_override)
{
    auto cfg = config::load(config_path);
    if (port_override)
        cfg.port = *port_override;

    // Block termination signals before any thread starts so only the waiter
    // below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto store = store::Store::open(cfg.database_path, cfg.sync_writes);
    auto lexicon = sentiment::Lexicon::load_file(cfg.lexicon_path);
    api::ServiceOptions options{cfg.policy,
                                auth::AuthConfig{cfg.pbkdf2_iterations, cfg.session_ttl_hours * kMillisPerHour}};
    api::ApiService service(*store, std::move(lexicon), options);
    if (cfg.admin_user && service.auth().bootstrap_admin(*cfg.admin_user, *cfg.admin_password, now_millis()))
        std::cerr << "created admin account '" << *cfg.admin_user << "'\n";

    api::HttpServer server(service, cfg.threads);
    const int port = server.bind(cfg.host, cfg.port);
    if (port < 0) {
        std::cerr << "cannot bind " << cfg.host << ":" << cfg.port << "\n";
        return 1;
    }
    std::cout << "listening on http://" << cfg.host << ":" << port << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen();
    // listen() also returns if the socket fails; wake the waiter either way.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"stageseat ticketing server and utilities"};
    app.require_subcommand(1);

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
    std::string config_path;
    std::optional<int> port;
    serve_cmd->add_option("--config", config_path, "JSON config file (env STAGESEAT_* overrides apply)");
    serve_cmd->add_option("--port", port, "override the configured port (0 picks a free one)");

    auto* seed_cmd = app.add_subcommand("seed", "generate a deterministic dataset");
    seed::SeedOptions seed_opts;
    std::string seed_db, seed_out, seed_lexicon = "lexicon/seed.tsv", base_date, seed_password = "password123";
    int seed_iterations = auth::kDefaultIterations;
    seed_cmd->add_option("--movies", seed_opts.movies)->check(CLI::PositiveNumber);
    seed_cmd->add_option("--venues", seed_opts.venues)->check(CLI::PositiveNumber);
    seed_cmd->add_option("--users", seed_opts.users)->check(CLI::NonNegativeNumber);
    seed_cmd->add_option("--bookings", seed_opts.bookings)->check(CLI::NonNegativeNumber);
    seed_cmd->add_option("--reviews", seed_opts.reviews)->check(CLI::NonNegativeNumber);
    seed_cmd->add_option("--days", seed_opts.days, "days of shows starting at the base date")
        ->check(CLI::NonNegativeNumber);
    seed_cmd->add_option("--shows-per-day", seed_opts.shows_per_venue_day, "per venue, at most 4")
        ->check(CLI::Range(0, 4));
    seed_cmd->add_option("--seed", seed_opts.seed);
    seed_cmd->add_option("--base-date", base_date, "YYYY-MM-DD (default: today, UTC)");
    seed_cmd->add_option("--lexicon", seed_lexicon);
    seed_cmd->add_option("--password", seed_password, "password of every generated user");
    seed_cmd->add_option("--iterations", seed_iterations, "PBKDF2 iterations for user passwords");
    auto* db_opt = seed_cmd->add_option("--db", seed_db, "journal file to write into (must be empty)");
    auto* out_opt = seed_cmd->add_option("--out", seed_out, "write a fixture file instead");
    db_opt->excludes(out_opt);

    auto* fixtures_cmd = app.add_subcommand("fixtures", "export or import fixture files");
    fixtures_cmd->require_subcommand(1);
    std::string fx_db, fx_path;
    auto* export_cmd = fixtures_cmd->add_subcommand("export", "write the store as fixtures");
    export_cmd->add_option("--db", fx_db, "journal file")->required();
    export_cmd->add_option("path", fx_path)->required();
    auto* import_cmd = fixtures_cmd->add_subcommand("import", "load fixtures into an empty store");
    import_cmd->add_option("--db", fx_db, "journal file")->required();
    import_cmd->add_option("path", fx_path)->required();

    auto* sentiment_cmd = app.add_subcommand("sentiment", "lexicon sentiment tools");
    sentiment_cmd->require_subcommand(1);
    auto* score_cmd = sentiment_cmd->add_subcommand("score", "print compound<TAB>label");
    std::string lex_path = "lexicon/seed.tsv", text;
    bool from_stdin = false;
    score_cmd->add_option("--lexicon", lex_path);
    auto* text_opt = score_cmd->add_option("--text", text);
    auto* stdin_opt = score_cmd->add_flag("--stdin", from_stdin, "score each input line");
    text_opt->excludes(stdin_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd)
            return serve(config_path, port);

        if (*seed_cmd) {
            if (seed_db.empty() && seed_out.empty())
                throw Error(ErrorCode::BadRequest, "seed needs --db or --out");
            seed_opts.base_date = base_date.empty() ? Date::of(now_millis()) : Date::parse(base_date);
            auto lexicon = sentiment::Lexicon::load_file(seed_lexicon);
            auto store = seed_db.empty() ? std::make_unique<store::Store>() : store::Store::open(seed_db);
            if (store->read([](const store::View& v) { return v.record_count(); }) != 0)
                throw Error(ErrorCode::ImportIntoNonEmptyStore, "target store is not empty");
            booking::BookingEngine engine(*store, Policy{});
            const auto counts = seed::generate(*store, engine, lexicon, seed_opts,
                                               auth::hash_password(seed_password, seed_iterations));
            if (!seed_out.empty())
                store->export_fixtures(std::filesystem::path(seed_out));
            std::cout << "movies " << counts.movies << "\nvenues " << counts.venues << "\nshows " << counts.shows
                      << "\nusers " << counts.users << "\nbookings " << counts.bookings << "\nreviews "
                      << counts.reviews << "\n";
            return 0;
        }

        if (*export_cmd) {
            auto store = store::Store::open(fx_db);
            store->export_fixtures(std::filesystem::path(fx_path));
            return 0;
        }
        if (*import_cmd) {
            auto store = store::Store::open(fx_db);
            const auto counts = store->import_fixtures(std::filesystem::path(fx_path));
            for (const auto& [kind, n] : counts.by_kind)
                std::cout << kind << " " << n << "\n";
            std::cout << "total " << counts.total << "\n";
            return 0;
        }

        if (*score_cmd) {
            auto lexicon = sentiment::Lexicon::load_file(lex_path);
            auto print = [&](const std::string& line) {
                const auto s = sentiment::score_text(lexicon, line);
                std::printf("%.4f\t%s\n", s.compound, std::string(to_string(s.label)).c_str());
            };
            if (from_stdin) {
                std::string line;
                while (std::getline(std::cin, line))
                    print(line);
            } else {
                print(text);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
