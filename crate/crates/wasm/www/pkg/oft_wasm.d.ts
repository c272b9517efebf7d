/* tslint:disable */
/* eslint-disable */

/**
 * Field scattered by a Gaussian bump `β = 1 + A e^{-|x|²/w²}` on `[-1, 1]²`
 * under a plane wave along `x₁`. Values run fastest along `x₁`.
 */
export class Scatter2d {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly im: Float64Array;
    readonly n: number;
    readonly re: Float64Array;
    readonly residual: number;
    readonly wallTime: number;
}

/**
 * 1D solve of the packet `e^{-10x² + iκx}` on `[-1, 1]` in a uniform medium,
 * next to the exact modal solution.
 */
export class Solve1d {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Real part of the computed field.
     */
    readonly approx: Float64Array;
    /**
     * Real part of the exact field.
     */
    readonly exact: Float64Array;
    readonly relErr: number;
    readonly residual: number;
    readonly steps: number;
    readonly x: Float64Array;
}

export function eigenSpectrum(alpha: number, length: number, count: number): Float64Array;

export function scatter2d(n: number, kappa: number, amplitude: number, width: number, dt0: number): Scatter2d;

export function solve1d(kappa: number, nx: number, dt0: number, t_final: number): Solve1d;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_scatter2d_free: (a: number, b: number) => void;
    readonly __wbg_solve1d_free: (a: number, b: number) => void;
    readonly eigenSpectrum: (a: number, b: number, c: number) => [number, number, number, number];
    readonly scatter2d: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly scatter2d_im: (a: number) => [number, number];
    readonly scatter2d_n: (a: number) => number;
    readonly scatter2d_re: (a: number) => [number, number];
    readonly scatter2d_residual: (a: number) => number;
    readonly scatter2d_wallTime: (a: number) => number;
    readonly solve1d: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly solve1d_approx: (a: number) => [number, number];
    readonly solve1d_exact: (a: number) => [number, number];
    readonly solve1d_relErr: (a: number) => number;
    readonly solve1d_residual: (a: number) => number;
    readonly solve1d_steps: (a: number) => number;
    readonly solve1d_x: (a: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
