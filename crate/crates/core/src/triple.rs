//! Finite-dimensional boundary triples `(A, L, B)` and the operator matrices
//! built from them.
//!
//! The domain of the maximal operator is modelled as a coordinate space of
//! dimension `n = p + m`. Two maps leave it: the embedding `J` into the
//! state space `X = ℂᵖ` and the trace `L` onto the boundary space `∂X = ℂᵐ`.
//! Invertibility of the stacked map `[J; L]` is what makes a pair
//! `(u, v) ∈ X × ∂X` correspond to exactly one domain element carrying
//! state `u` and trace `v`, i.e. the coupled domain `{Lu = v}` of the block
//! generator is all of `X × ∂X` in coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{self, check_matrix, complexify, inverse, norm_inf, Lu, Scalar};

/// Maximal operator `A`, trace `L`, optional feedback `B` and embedding `J`.
#[derive(Debug, Clone)]
pub struct MaximalTriple<T: Scalar = f64> {
    maximal: DMatrix<T>,
    trace: DMatrix<T>,
    embedding: DMatrix<T>,
    feedback: Option<DMatrix<T>>,
    /// `[J; L]⁻¹`, columns `0..p` lift states, columns `p..n` lift traces.
    reconstruction: DMatrix<T>,
    condition: f64,
}

/// `D_λ`: boundary data to the unique element of `ker(λ − A)` with that trace.
#[derive(Debug, Clone)]
pub struct DirichletOperator<T: Scalar = f64> {
    pub lambda: T,
    /// `n × m` lift into the domain coordinates.
    pub full: DMatrix<T>,
    /// `p × m` state part `J·full`.
    pub state: DMatrix<T>,
}

/// A `(p+m) × (p+m)` matrix viewed as a 2×2 block operator on `X × ∂X`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T: Scalar = f64> {
    p: usize,
    m: usize,
    matrix: DMatrix<T>,
}

/// Generator of the coupled system on `X × ∂X`: `𝒜` (no feedback) or `Ã`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGenerator<T: Scalar = f64> {
    pub block: BlockMatrix<T>,
    pub feedback: bool,
}

/// Pieces of the similarity argument for feedback generators at `λ₀`.
#[derive(Debug, Clone)]
pub struct SimilarityDecomposition<T: Scalar = f64> {
    pub lambda0: T,
    /// `[[A₀ − D_{λ₀}B, 0], [B, 0]]`
    pub principal: BlockMatrix<T>,
    /// `[[0, −D_{λ₀}B_{λ₀}], [0, B_{λ₀}]]`
    pub bounded: BlockMatrix<T>,
    /// `[[A₀, 0], [B, B_{λ₀}]]`
    pub coupled: BlockMatrix<T>,
    /// `[[I, −D_{λ₀}], [0, I]]`
    pub shear: BlockMatrix<T>,
    /// `[[0, D_{λ₀}], [0, 0]]`
    pub perturbation: BlockMatrix<T>,
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn new(p: usize, m: usize, matrix: DMatrix<T>) -> Result<Self> {
        if matrix.shape() != (p + m, p + m) {
            return Err(Error::DimensionMismatch(format!(
                "block matrix must be {0}x{0}, got {1}x{2}",
                p + m,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { p, m, matrix })
    }

    pub fn from_blocks(a11: &DMatrix<T>, a12: &DMatrix<T>, a21: &DMatrix<T>, a22: &DMatrix<T>) -> Result<Self> {
        let (p, m) = (a11.nrows(), a22.nrows());
        if a11.ncols() != p || a12.shape() != (p, m) || a21.shape() != (m, p) || a22.ncols() != m {
            return Err(Error::DimensionMismatch("incompatible block shapes".into()));
        }
        let mut matrix = DMatrix::zeros(p + m, p + m);
        matrix.view_mut((0, 0), (p, p)).copy_from(a11);
        matrix.view_mut((0, p), (p, m)).copy_from(a12);
        matrix.view_mut((p, 0), (m, p)).copy_from(a21);
        matrix.view_mut((p, p), (m, m)).copy_from(a22);
        Ok(Self { p, m, matrix })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    pub fn block11(&self) -> DMatrix<T> {
        self.matrix.view((0, 0), (self.p, self.p)).into_owned()
    }

    pub fn block12(&self) -> DMatrix<T> {
        self.matrix.view((0, self.p), (self.p, self.m)).into_owned()
    }

    pub fn block21(&self) -> DMatrix<T> {
        self.matrix.view((self.p, 0), (self.m, self.p)).into_owned()
    }

    pub fn block22(&self) -> DMatrix<T> {
        self.matrix.view((self.p, self.p), (self.m, self.m)).into_owned()
    }

    /// Block product; both factors must share the same splitting.
    pub fn mul(&self, rhs: &BlockMatrix<T>) -> Result<BlockMatrix<T>> {
        if (self.p, self.m) != (rhs.p, rhs.m) {
            return Err(Error::DimensionMismatch("block splittings differ".into()));
        }
        Ok(Self { p: self.p, m: self.m, matrix: &self.matrix * &rhs.matrix })
    }

    pub fn add(&self, rhs: &BlockMatrix<T>) -> Result<BlockMatrix<T>> {
        if (self.p, self.m) != (rhs.p, rhs.m) {
            return Err(Error::DimensionMismatch("block splittings differ".into()));
        }
        Ok(Self { p: self.p, m: self.m, matrix: &self.matrix + &rhs.matrix })
    }

    /// `self − λ·I`.
    pub fn shifted(&self, lambda: T) -> BlockMatrix<T> {
        let n = self.p + self.m;
        Self { p: self.p, m: self.m, matrix: &self.matrix - DMatrix::<T>::identity(n, n) * lambda }
    }

    pub fn distance(&self, other: &BlockMatrix<T>) -> f64 {
        numerics::diff_norm_inf(&self.matrix, &other.matrix)
    }
}

impl<T: Scalar> BlockGenerator<T> {
    pub fn dim(&self) -> usize {
        self.block.p + self.block.m
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.block.matrix
    }
}

impl<T: Scalar> DirichletOperator<T> {
    /// `‖L·D − I‖_∞`.
    pub fn trace_residual(&self, triple: &MaximalTriple<T>) -> f64 {
        let m = triple.m();
        numerics::diff_norm_inf(&(&triple.trace * &self.full), &DMatrix::identity(m, m))
    }

    /// `‖(λJ − A)·D‖_∞ / ‖A‖_∞`.
    pub fn kernel_residual(&self, triple: &MaximalTriple<T>) -> f64 {
        let op = &triple.embedding * self.lambda - &triple.maximal;
        norm_inf(&(op * &self.full)) / norm_inf(&triple.maximal).max(1.0)
    }
}

fn spectrum_error<T: Scalar>(lambda: T) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::SingularMatrix { .. } => Error::LambdaInSpectrum { lambda: format!("{lambda}") },
        other => other,
    }
}

impl<T: Scalar> MaximalTriple<T> {
    /// Builds a triple from `A` (p×n), `L` (m×n), `J` (p×n) and optional `B` (m×n).
    ///
    /// Fails unless `n = p + m` and `[J; L]` is invertible, which also forces
    /// `L` to have full row rank.
    pub fn new(
        maximal: DMatrix<T>,
        trace: DMatrix<T>,
        embedding: DMatrix<T>,
        feedback: Option<DMatrix<T>>,
    ) -> Result<Self> {
        check_matrix(&maximal, "maximal operator A")?;
        check_matrix(&trace, "trace operator L")?;
        check_matrix(&embedding, "embedding J")?;
        let (p, n) = maximal.shape();
        let m = trace.nrows();
        if embedding.shape() != (p, n) || trace.ncols() != n || p + m != n {
            return Err(Error::DimensionMismatch(format!(
                "need A,J: p x n and L: m x n with n = p + m; got A {:?}, J {:?}, L {:?}",
                maximal.shape(),
                embedding.shape(),
                trace.shape()
            )));
        }
        if let Some(b) = &feedback {
            check_matrix(b, "feedback operator B")?;
            if b.shape() != (m, n) {
                return Err(Error::DimensionMismatch(format!("B must be {m}x{n}, got {:?}", b.shape())));
            }
        }

        let mut stacked = DMatrix::zeros(n, n);
        stacked.view_mut((0, 0), (p, n)).copy_from(&embedding);
        stacked.view_mut((p, 0), (m, n)).copy_from(&trace);
        let reconstruction = inverse(&stacked)?;
        let condition = norm_inf(&stacked) * norm_inf(&reconstruction);

        Ok(Self { maximal, trace, embedding, feedback, reconstruction, condition })
    }

    pub fn p(&self) -> usize {
        self.maximal.nrows()
    }

    pub fn m(&self) -> usize {
        self.trace.nrows()
    }

    pub fn n(&self) -> usize {
        self.maximal.ncols()
    }

    pub fn maximal(&self) -> &DMatrix<T> {
        &self.maximal
    }

    pub fn trace(&self) -> &DMatrix<T> {
        &self.trace
    }

    pub fn embedding(&self) -> &DMatrix<T> {
        &self.embedding
    }

    pub fn feedback(&self) -> Option<&DMatrix<T>> {
        self.feedback.as_ref()
    }

    pub fn has_feedback(&self) -> bool {
        self.feedback.is_some()
    }

    /// Infinity-norm condition number of `[J; L]`.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    pub fn reconstruction_matrix(&self) -> &DMatrix<T> {
        &self.reconstruction
    }

    /// Same triple with `B` dropped (the `B = 0` problem).
    pub fn without_feedback(&self) -> Self {
        Self { feedback: None, ..self.clone() }
    }

    /// Domain element with state `u` and trace `v`.
    pub fn reconstruct(&self, u: &DVector<T>, v: &DVector<T>) -> Result<DVector<T>> {
        let (p, m) = (self.p(), self.m());
        if u.len() != p || v.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "reconstruct expects u in dim {p} and v in dim {m}, got {} and {}",
                u.len(),
                v.len()
            )));
        }
        Ok(self.reconstruction.columns(0, p) * u + self.reconstruction.columns(p, m) * v)
    }

    /// `A₀ = A|ker L` in state coordinates.
    pub fn restrict_a0(&self) -> DMatrix<T> {
        &self.maximal * self.reconstruction.columns(0, self.p())
    }

    /// `B` restricted to `ker L`, as an `m × p` matrix on state coordinates.
    pub fn feedback_on_kernel(&self) -> Result<DMatrix<T>> {
        let b = self.feedback.as_ref().ok_or(Error::MissingFeedback)?;
        Ok(b * self.reconstruction.columns(0, self.p()))
    }

    /// `R(λ, A₀) = (λ − A₀)⁻¹`.
    pub fn resolvent_a0(&self, lambda: T) -> Result<DMatrix<T>> {
        let p = self.p();
        let shifted = DMatrix::<T>::identity(p, p) * lambda - self.restrict_a0();
        inverse(&shifted).map_err(spectrum_error(lambda))
    }

    /// Solves `[(λJ − A); L]·D = [0; I]` column by column.
    pub fn dirichlet_map(&self, lambda: T) -> Result<DirichletOperator<T>> {
        let (p, m, n) = (self.p(), self.m(), self.n());
        let mut system = DMatrix::zeros(n, n);
        system.view_mut((0, 0), (p, n)).copy_from(&(&self.embedding * lambda - &self.maximal));
        system.view_mut((p, 0), (m, n)).copy_from(&self.trace);
        let mut rhs = DMatrix::zeros(n, m);
        rhs.view_mut((p, 0), (m, m)).fill_with_identity();

        let full = Lu::factor(&system).map_err(spectrum_error(lambda))?.solve(&rhs)?;
        let state = &self.embedding * &full;
        Ok(DirichletOperator { lambda, full, state })
    }

    /// `‖D_λ − (I + (μ−λ)R(λ,A₀))·D_μ‖_∞` in state coordinates.
    pub fn dirichlet_identity_residual(&self, lambda: T, mu: T) -> Result<f64> {
        let d_lambda = self.dirichlet_map(lambda)?;
        let d_mu = self.dirichlet_map(mu)?;
        let resolvent = self.resolvent_a0(lambda)?;
        let rhs = &d_mu.state + resolvent * &d_mu.state * (mu - lambda);
        Ok(numerics::diff_norm_inf(&d_lambda.state, &rhs))
    }

    /// `𝒜 = [[A, 0], [0, 0]]` or `Ã = [[A, 0], [B, 0]]` acting on the coupled
    /// domain `{Lu = v}`, written in `(u, v)` coordinates.
    pub fn build_block_generator(&self, feedback: bool) -> Result<BlockGenerator<T>> {
        let (p, m) = (self.p(), self.m());
        let mut matrix = DMatrix::zeros(p + m, p + m);
        matrix.view_mut((0, 0), (p, p + m)).copy_from(&(&self.maximal * &self.reconstruction));
        if feedback {
            let b = self.feedback.as_ref().ok_or(Error::MissingFeedback)?;
            matrix.view_mut((p, 0), (m, p + m)).copy_from(&(b * &self.reconstruction));
        }
        Ok(BlockGenerator { block: BlockMatrix { p, m, matrix }, feedback })
    }

    /// `Ã` when the triple carries `B`, else `𝒜`.
    pub fn generator(&self) -> BlockGenerator<T> {
        self.build_block_generator(self.has_feedback()).expect("feedback presence was checked")
    }

    fn shear(&self, d_state: &DMatrix<T>) -> BlockMatrix<T> {
        let (p, m) = (self.p(), self.m());
        BlockMatrix::from_blocks(&DMatrix::identity(p, p), &-d_state, &DMatrix::zeros(m, p), &DMatrix::identity(m, m))
            .expect("shapes fixed by the triple")
    }

    /// `𝒜 − λ = 𝒜_λ·ℛ_λ` with `𝒜_λ = [[A₀−λ, 0], [0, −λ]]`, `ℛ_λ = [[I, −D_λ], [0, I]]`.
    ///
    /// Concerns the `B = 0` generator; a feedback operator, if present, is ignored.
    pub fn factorize(&self, lambda: T) -> Result<(BlockMatrix<T>, BlockMatrix<T>)> {
        let (p, m) = (self.p(), self.m());
        let d = self.dirichlet_map(lambda)?;
        let a_lambda = BlockMatrix::from_blocks(
            &(self.restrict_a0() - DMatrix::<T>::identity(p, p) * lambda),
            &DMatrix::zeros(p, m),
            &DMatrix::zeros(m, p),
            &(DMatrix::<T>::identity(m, m) * -lambda),
        )?;
        Ok((a_lambda, self.shear(&d.state)))
    }

    /// `Ã − λ = [[A₀−λ, 0], [B, B_λ−λ]]·ℛ_λ`.
    pub fn feedback_factorize(&self, lambda: T) -> Result<(BlockMatrix<T>, BlockMatrix<T>)> {
        let (p, m) = (self.p(), self.m());
        let b_kernel = self.feedback_on_kernel()?;
        let d = self.dirichlet_map(lambda)?;
        let b_lambda = self.feedback.as_ref().ok_or(Error::MissingFeedback)? * &d.full;
        let factor = BlockMatrix::from_blocks(
            &(self.restrict_a0() - DMatrix::<T>::identity(p, p) * lambda),
            &DMatrix::zeros(p, m),
            &b_kernel,
            &(b_lambda - DMatrix::<T>::identity(m, m) * lambda),
        )?;
        Ok((factor, self.shear(&d.state)))
    }

    /// `B_λ = B·D_λ` on the boundary space.
    pub fn b_lambda(&self, lambda: T) -> Result<DMatrix<T>> {
        let b = self.feedback.as_ref().ok_or(Error::MissingFeedback)?;
        Ok(b * self.dirichlet_map(lambda)?.full)
    }

    /// `ℛ_{λ₀}·Ã_{λ₀} = ℳ + 𝒩`, the similarity that reduces `Ã` to a generator
    /// with diagonal domain plus a bounded perturbation.
    pub fn similarity_decompose(&self, lambda0: T) -> Result<SimilarityDecomposition<T>> {
        let (p, m) = (self.p(), self.m());
        let b_kernel = self.feedback_on_kernel()?;
        let d = self.dirichlet_map(lambda0)?;
        let b_l0 = self.feedback.as_ref().ok_or(Error::MissingFeedback)? * &d.full;
        let a0 = self.restrict_a0();
        let zero_pm = DMatrix::zeros(p, m);
        let zero_mp = DMatrix::zeros(m, p);
        let zero_mm = DMatrix::zeros(m, m);

        let principal = BlockMatrix::from_blocks(&(&a0 - &d.state * &b_kernel), &zero_pm, &b_kernel, &zero_mm)?;
        let bounded = BlockMatrix::from_blocks(&DMatrix::zeros(p, p), &-(&d.state * &b_l0), &zero_mp, &b_l0)?;
        let coupled = BlockMatrix::from_blocks(&a0, &zero_pm, &b_kernel, &b_l0)?;
        let perturbation = BlockMatrix::from_blocks(&DMatrix::zeros(p, p), &d.state, &zero_mp, &zero_mm)?;
        Ok(SimilarityDecomposition { lambda0, principal, bounded, coupled, shear: self.shear(&d.state), perturbation })
    }

    /// `R(λ, 𝒜) = [[R(λ,A₀), D_λ/λ], [0, 1/λ]]`, valid on `ρ(A₀) ∖ {0}`.
    pub fn block_resolvent(&self, lambda: T) -> Result<BlockMatrix<T>> {
        if lambda == T::zero() {
            return Err(Error::LambdaZero);
        }
        let (p, m) = (self.p(), self.m());
        let resolvent = self.resolvent_a0(lambda)?;
        let d = self.dirichlet_map(lambda)?;
        let inv = T::one() / lambda;
        BlockMatrix::from_blocks(&resolvent, &(d.state * inv), &DMatrix::zeros(m, p), &(DMatrix::identity(m, m) * inv))
    }
}

impl<T: Scalar> SimilarityDecomposition<T> {
    /// `‖(ℳ + 𝒩) − ℛ_{λ₀}·Ã_{λ₀}‖_∞`.
    pub fn assembly_residual(&self) -> Result<f64> {
        let sum = self.principal.add(&self.bounded)?;
        Ok(sum.distance(&self.shear.mul(&self.coupled)?))
    }

    /// `Ã_{λ₀}·ℛ_{λ₀} + λ₀·𝒫_{λ₀}`, which equals `Ã`.
    pub fn recombined_generator(&self) -> Result<BlockMatrix<T>> {
        let scaled = BlockMatrix {
            p: self.perturbation.p,
            m: self.perturbation.m,
            matrix: self.perturbation.matrix() * self.lambda0,
        };
        self.coupled.mul(&self.shear)?.add(&scaled)
    }
}

impl MaximalTriple<f64> {
    /// Same operators over the complex field, for complex spectral parameters.
    pub fn to_complex(&self) -> MaximalTriple<Complex64> {
        MaximalTriple {
            maximal: complexify(&self.maximal),
            trace: complexify(&self.trace),
            embedding: complexify(&self.embedding),
            feedback: self.feedback.as_ref().map(complexify),
            reconstruction: complexify(&self.reconstruction),
            condition: self.condition,
        }
    }
}
