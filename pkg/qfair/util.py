# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：util.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：常用的函数集合，控制台提示都走 stderr，stdout 留给 JSON
# ---------------------------------------
import sys

from colorama import Fore, Style

from qfair.time import get_now


class attrdict(dict):
    """
    可以用属性访问的字典
    """

    def __init__(self, *args, **kwargs):
        dict.__init__(self, *args, **kwargs)
        self.__dict__ = self


def echo(*args, color=None, is_print=True):
    """
    打印带时间的提示信息
    例子：
    echo('开始求解', color=Fore.BLUE)
    """
    if not is_print:
        return
    text = ' '.join(str(arg) for arg in args)
    if color:
        print(f'{color}{get_now()} {text}{Style.RESET_ALL}', file=sys.stderr)
    else:
        print(f'{get_now()} {text}', file=sys.stderr)


def warn(*args, is_print=True):
    echo(*args, color=Fore.YELLOW, is_print=is_print)


def error(*args):
    echo(*args, color=Fore.RED)
