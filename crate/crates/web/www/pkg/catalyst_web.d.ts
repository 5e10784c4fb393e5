/* tslint:disable */
/* eslint-disable */

/**
 * A 2-D quadratic `½xᵀQx + bᵀx` with eigenvalues `{−ρ, L}` along axes
 * rotated by `angle`, restricted to the disk of radius `radius`.
 */
export class Landscape {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * κ returned by one adaptation call at `(x, y)` from `kappa0`, for each
     * inner budget `1..=max_inner`. Failed calls are reported as NaN.
     */
    adapted_kappa(x: number, y: number, kappa0: number, max_inner: number): Float64Array;
    /**
     * Smooth part on an `n × n` grid over `[−extent, extent]²`, row-major
     * from the top-left corner; points outside the disk are NaN.
     */
    grid(n: number, extent: number): Float64Array;
    constructor(rho: number, lipschitz: number, angle: number, radius: number, tilt: number);
    /**
     * Runs the outer loop from `(x, y)` with gradient-descent inner solves.
     */
    run(x: number, y: number, kappa0: number, inner: number, iterations: number, adaptive: boolean): Trajectory;
    value(x: number, y: number): number;
}

/**
 * Output of [`Landscape::run`]. Point buffers are flat `[x, y, x, y, …]`.
 */
export class Trajectory {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `x̃_1, x̃_2, …`
     */
    accel_points(): Float64Array;
    error(): string | undefined;
    /**
     * `x_0, x_1, …`
     */
    iterates(): Float64Array;
    kappas(): Float64Array;
    /**
     * `x̄_1, x̄_2, …`
     */
    prox_points(): Float64Array;
    /**
     * `f(x_0), f(x_1), …`
     */
    values(): Float64Array;
    /**
     * 0 = proximal point kept, 1 = extrapolated point kept, 2 = neither.
     */
    winners(): Uint8Array;
}

/**
 * `[α_k, √2/(k+2), 2/(k+1)]` for `k = 1..=count`, row by row.
 */
export function alpha_envelope(count: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_landscape_free: (a: number, b: number) => void;
    readonly __wbg_trajectory_free: (a: number, b: number) => void;
    readonly alpha_envelope: (a: number) => [number, number];
    readonly landscape_adapted_kappa: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly landscape_grid: (a: number, b: number, c: number) => [number, number];
    readonly landscape_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly landscape_run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => number;
    readonly landscape_value: (a: number, b: number, c: number) => number;
    readonly trajectory_accel_points: (a: number) => [number, number];
    readonly trajectory_error: (a: number) => [number, number];
    readonly trajectory_iterates: (a: number) => [number, number];
    readonly trajectory_kappas: (a: number) => [number, number];
    readonly trajectory_prox_points: (a: number) => [number, number];
    readonly trajectory_values: (a: number) => [number, number];
    readonly trajectory_winners: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
