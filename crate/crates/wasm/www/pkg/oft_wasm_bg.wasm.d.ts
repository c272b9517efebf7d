/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_scatter2d_free: (a: number, b: number) => void;
export const __wbg_solve1d_free: (a: number, b: number) => void;
export const eigenSpectrum: (a: number, b: number, c: number) => [number, number, number, number];
export const scatter2d: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const scatter2d_im: (a: number) => [number, number];
export const scatter2d_n: (a: number) => number;
export const scatter2d_re: (a: number) => [number, number];
export const scatter2d_residual: (a: number) => number;
export const scatter2d_wallTime: (a: number) => number;
export const solve1d: (a: number, b: number, c: number, d: number) => [number, number, number];
export const solve1d_approx: (a: number) => [number, number];
export const solve1d_exact: (a: number) => [number, number];
export const solve1d_relErr: (a: number) => number;
export const solve1d_residual: (a: number) => number;
export const solve1d_steps: (a: number) => number;
export const solve1d_x: (a: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
