//! Exact Riemann solver for the 1D Euler equations of an ideal gas.

#[derive(Debug, Clone, Copy)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

pub struct ExactRiemann {
    pub left: Primitive,
    pub right: Primitive,
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
}

impl ExactRiemann {
    pub fn new(left: Primitive, right: Primitive, gamma: f64) -> Self {
        let mut s = Self {
            left,
            right,
            gamma,
            p_star: 0.0,
            u_star: 0.0,
        };
        s.solve_star();
        s
    }

    fn sound(&self, w: &Primitive) -> f64 {
        (self.gamma * w.p / w.rho).sqrt()
    }

    /// Pressure function of one side and its derivative.
    fn side(&self, p: f64, w: &Primitive) -> (f64, f64) {
        let g = self.gamma;
        let c = self.sound(w);
        if p > w.p {
            let a = 2.0 / ((g + 1.0) * w.rho);
            let b = (g - 1.0) / (g + 1.0) * w.p;
            let q = (a / (p + b)).sqrt();
            ((p - w.p) * q, q * (1.0 - 0.5 * (p - w.p) / (p + b)))
        } else {
            let e = (g - 1.0) / (2.0 * g);
            (
                2.0 * c / (g - 1.0) * ((p / w.p).powf(e) - 1.0),
                (p / w.p).powf(-(g + 1.0) / (2.0 * g)) / (w.rho * c),
            )
        }
    }

    fn solve_star(&mut self) {
        let (l, r) = (self.left, self.right);
        let mut p = 0.5 * (l.p + r.p);
        for _ in 0..200 {
            let (fl, dl) = self.side(p, &l);
            let (fr, dr) = self.side(p, &r);
            let f = fl + fr + r.u - l.u;
            let np = (p - f / (dl + dr)).max(1e-12);
            let done = (np - p).abs() < 1e-15 * np;
            p = np;
            if done {
                break;
            }
        }
        let (fl, _) = self.side(p, &l);
        let (fr, _) = self.side(p, &r);
        self.p_star = p;
        self.u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);
    }

    /// Density behind the shock / contact on each side.
    pub fn star_densities(&self) -> (f64, f64) {
        let g = self.gamma;
        let dens = |w: &Primitive| {
            let ratio = self.p_star / w.p;
            if ratio > 1.0 {
                let k = (g - 1.0) / (g + 1.0);
                w.rho * (ratio + k) / (ratio * k + 1.0)
            } else {
                w.rho * ratio.powf(1.0 / g)
            }
        };
        (dens(&self.left), dens(&self.right))
    }

    /// Solution at similarity coordinate `s = x / t`.
    pub fn sample(&self, s: f64) -> Primitive {
        let g = self.gamma;
        let (l, r) = (self.left, self.right);
        let (rl, rr) = self.star_densities();
        if s <= self.u_star {
            let c = self.sound(&l);
            if self.p_star > l.p {
                let sh = l.u - c * ((g + 1.0) / (2.0 * g) * self.p_star / l.p + (g - 1.0) / (2.0 * g)).sqrt();
                if s < sh {
                    l
                } else {
                    Primitive { rho: rl, u: self.u_star, p: self.p_star }
                }
            } else {
                let head = l.u - c;
                let cs = c * (self.p_star / l.p).powf((g - 1.0) / (2.0 * g));
                let tail = self.u_star - cs;
                if s < head {
                    l
                } else if s > tail {
                    Primitive { rho: rl, u: self.u_star, p: self.p_star }
                } else {
                    let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (l.u - s);
                    Primitive {
                        rho: l.rho * k.powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * l.u + s),
                        p: l.p * k.powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        } else {
            let c = self.sound(&r);
            if self.p_star > r.p {
                let sh = r.u + c * ((g + 1.0) / (2.0 * g) * self.p_star / r.p + (g - 1.0) / (2.0 * g)).sqrt();
                if s > sh {
                    r
                } else {
                    Primitive { rho: rr, u: self.u_star, p: self.p_star }
                }
            } else {
                let head = r.u + c;
                let cs = c * (self.p_star / r.p).powf((g - 1.0) / (2.0 * g));
                let tail = self.u_star + cs;
                if s > head {
                    r
                } else if s < tail {
                    Primitive { rho: rr, u: self.u_star, p: self.p_star }
                } else {
                    let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (r.u - s);
                    Primitive {
                        rho: r.rho * k.powf(2.0 / (g - 1.0)),
                        u: 2.0 / (g + 1.0) * (-c + 0.5 * (g - 1.0) * r.u + s),
                        p: r.p * k.powf(2.0 * g / (g - 1.0)),
                    }
                }
            }
        }
    }

    /// Wave positions `x/t`: rarefaction head and tail (or left shock),
    /// contact, right shock (or rarefaction edges).
    pub fn wave_speeds(&self) -> Vec<f64> {
        let g = self.gamma;
        let (l, r) = (self.left, self.right);
        let mut out = Vec::new();
        let cl = self.sound(&l);
        if self.p_star > l.p {
            out.push(l.u - cl * ((g + 1.0) / (2.0 * g) * self.p_star / l.p + (g - 1.0) / (2.0 * g)).sqrt());
        } else {
            out.push(l.u - cl);
            out.push(self.u_star - cl * (self.p_star / l.p).powf((g - 1.0) / (2.0 * g)));
        }
        out.push(self.u_star);
        let cr = self.sound(&r);
        if self.p_star > r.p {
            out.push(r.u + cr * ((g + 1.0) / (2.0 * g) * self.p_star / r.p + (g - 1.0) / (2.0 * g)).sqrt());
        } else {
            out.push(self.u_star + cr * (self.p_star / r.p).powf((g - 1.0) / (2.0 * g)));
            out.push(r.u + cr);
        }
        out
    }
}
