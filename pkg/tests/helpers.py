from tendonfinger.simulator import TraceRecord


def synthetic_trace(t, x1, x1d=None, v=None, s=None, eta=None):
    n = len(t)
    x1d = [0.0] * n if x1d is None else x1d
    v = [0.0] * n if v is None else v
    s = [0.0] * n if s is None else s
    eta = [0.0] * n if eta is None else eta
    zero = dict.fromkeys(TraceRecord._fields, 0.0)
    out = []
    for k in range(n):
        row = dict(zero, t=float(t[k]), x1=float(x1[k]), x1d=float(x1d[k]), e=float(x1[k] - x1d[k]),
                   v=float(v[k]), s=float(s[k]), eta=float(eta[k]))
        out.append(TraceRecord(**row))
    return out
