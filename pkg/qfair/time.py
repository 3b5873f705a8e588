# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：time.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：计时和时间显示，求解器和基准测试都用它统计用时
# ---------------------------------------
import sys
import time
import datetime


def get_now(fmt="%Y-%m-%d %H:%M:%S"):
    """
    获取当前日期和时间
    :return: 格式 2018-11-28 15:03:08
    """
    return datetime.datetime.now().strftime(fmt)


def second_to_time_str(seconds):
    """
    已用秒数转为中文显示，例如 3661.099 -> '1小时1分1.099秒'
    """
    minutes, rest = divmod(float(seconds), 60)
    hours, minutes = divmod(int(minutes), 60)
    text = f'{hours}小时' if hours else ''
    if minutes:
        text += f'{minutes}分'
    return f'{text}{rest:.3f}秒'


def _print(text):
    print(f'{get_now()} {text}', file=sys.stderr)


class Timer:
    """
    计时器，用 with 来对代码计时

    # 例子：
        >>> with Timer('求解', is_print=True) as timer:
        >>>     solve()
        >>> timer.elapsed
        1.0003
    """

    def __init__(self, name=None, is_print=False):
        self.start = time.perf_counter()
        self.stop = None
        self.is_print = is_print

        self.name = f'{name} ' if name else ''
        if self.is_print:
            _print(f'开始运行 {self.name}')

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop = time.perf_counter()
        if self.is_print:
            self.running_time()
        return False

    @property
    def elapsed(self):
        """
        已用秒数，with 块结束后固定下来
        """
        stop = self.stop if self.stop is not None else time.perf_counter()
        return stop - self.start

    def running_time(self):
        _print(f'结束运行 {self.name}，运行时间 {second_to_time_str(self.elapsed)}')
