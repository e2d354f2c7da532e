#include "fellerdep/quadrature.hpp"

namespace fellerdep
{
// Semi-infinite sides use y = a + u/(1-u), u in [0,1).
IntervalMap::IntervalMap(Interval iv) : original_(iv)
{
    const bool lo_inf = std::isinf(iv.lower);
    const bool hi_inf = std::isinf(iv.upper);
    if (!lo_inf && !hi_inf)
    {
        kind_ = Kind::finite;
        domain_ = iv;
    }
    else if (!lo_inf)
    {
        kind_ = Kind::upper_infinite;
        domain_ = {0.0, 1.0};
    }
    else if (!hi_inf)
    {
        kind_ = Kind::lower_infinite;
        domain_ = {0.0, 1.0};
    }
    else
    {
        kind_ = Kind::both_infinite;
        domain_ = {-1.0, 1.0};
    }
}

double IntervalMap::to_original(double u) const
{
    switch (kind_)
    {
    case Kind::finite:
        return u;
    case Kind::upper_infinite:
        return original_.lower + u / (1.0 - u);
    case Kind::lower_infinite:
        return original_.upper - u / (1.0 - u);
    case Kind::both_infinite:
        return u / (1.0 - u * u);
    }
    return u;
}

double IntervalMap::jacobian(double u) const
{
    switch (kind_)
    {
    case Kind::finite:
        return 1.0;
    case Kind::upper_infinite:
    case Kind::lower_infinite:
        return 1.0 / ((1.0 - u) * (1.0 - u));
    case Kind::both_infinite:
    {
        const double q = 1.0 - u * u;
        return (1.0 + u * u) / (q * q);
    }
    }
    return 1.0;
}

double IntervalMap::to_domain(double y) const
{
    switch (kind_)
    {
    case Kind::finite:
        return y;
    case Kind::upper_infinite:
    {
        const double s = y - original_.lower;
        return s / (1.0 + s);
    }
    case Kind::lower_infinite:
    {
        const double s = original_.upper - y;
        return s / (1.0 + s);
    }
    case Kind::both_infinite:
        // invert u/(1-u^2) = y
        if (y == 0.0)
            return 0.0;
        return (-1.0 + std::sqrt(1.0 + 4.0 * y * y)) / (2.0 * y);
    }
    return y;
}

}  // namespace fellerdep
