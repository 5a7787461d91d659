#include "hisac/log.hpp"

#include <iostream>
#include <mutex>

namespace hisac {

namespace {

WarningSink& sink()
{
    static WarningSink s = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

std::mutex& sink_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace

void set_warning_sink(WarningSink s)
{
    std::lock_guard<std::mutex> lock(sink_mutex());
    sink() = std::move(s);
}

void warn(const std::string& message)
{
    std::lock_guard<std::mutex> lock(sink_mutex());
    if (sink()) sink()(message);
}

} // namespace hisac
