#include <httplib.h>

#include "ldf/client.hpp"
#include "ldf/error.hpp"

namespace ldf::client {

struct HttpSource::Impl {
    explicit Impl(const std::string& base_url) : http(base_url) {}
    httplib::Client http;
};

HttpSource::HttpSource(const std::string& base_url, std::chrono::milliseconds io_timeout)
    : impl_(std::make_unique<Impl>(base_url)) {
    if (!impl_->http.is_valid()) throw TransportError("invalid endpoint URL '" + base_url + "'");
    impl_->http.set_keep_alive(true);
    impl_->http.set_url_encode(false);
    impl_->http.set_connection_timeout(io_timeout);
    impl_->http.set_read_timeout(io_timeout);
    impl_->http.set_write_timeout(io_timeout);
}

HttpSource::~HttpSource() = default;

server::Reply HttpSource::get(const std::string& target) {
    auto res = impl_->http.Get(target);
    if (!res) throw TransportError("GET " + target.substr(0, 80) + " failed: " + httplib::to_string(res.error()));
    return {res->status, std::move(res->body)};
}

}  // namespace ldf::client
